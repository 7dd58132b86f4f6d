#include "helpers.hpp"

#include <cmath>
#include <numbers>

using namespace tarlev;
using namespace tarlev::inference;
using tarlev::testing::preset;

namespace {

core::TarPath simulate_preset(const std::string& name, std::size_t n, std::uint64_t seed) {
    const auto doc = preset(name);
    return core::simulate_tar(doc.spec, doc.z, n, 300, seed);
}

std::vector<double> gaussian_noise(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<double> e(n);
    for (auto& v : e) v = g(rng);
    return e;
}

std::vector<double> ar_path(const std::vector<double>& a, std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<double> x(n + 200, 0.0);
    for (std::size_t t = 0; t < x.size(); ++t) {
        double v = g(rng);
        for (std::size_t i = 0; i < a.size() && i < t; ++i) v += a[i] * x[t - 1 - i];
        x[t] = v;
    }
    return {x.begin() + 200, x.end()};
}

StructureCandidate m1_structure() {
    StructureCandidate s;
    s.l = 2;
    s.thresholds = {0.0};
    s.orders = {0, 1};
    return s;
}

}  // namespace

TEST(Likelihood, StandardNormalAtZero) {
    core::TarSpec s;
    s.regimes = {{0.0, {}, 1.0}};
    const std::vector<double> x{0.0, 0.0};
    const std::vector<std::size_t> reg{0, 0};
    EXPECT_NEAR(conditional_log_likelihood(s, x, reg), -std::log(2.0 * std::numbers::pi), 1e-14);
}

TEST(Likelihood, ResidualMatchingNoiseWeightIsOptimal) {
    const auto doc = preset("m1");
    const auto path = simulate_preset("m1", 800, 3);
    const auto reg = regimes_from_z(doc.spec, path.z);
    // per-regime maximizer of -n ln h - SSR / (2 h^2) is h^2 = SSR / n
    auto spec = doc.spec;
    for (std::size_t j = 0; j < 2; ++j) {
        double ssr = 0.0, n = 0.0;
        for (std::size_t t = 1; t < path.x.size(); ++t) {
            if (reg[t] != j) continue;
            const double e = path.x[t] - spec.regimes[j].conditional_mean({path.x[t - 1]});
            ssr += e * e;
            n += 1.0;
        }
        spec.regimes[j].noise_weight = std::sqrt(ssr / n);
    }
    const double best = conditional_log_likelihood(spec, path.x, reg);
    for (std::size_t j = 0; j < 2; ++j) {
        for (double f : {0.9, 1.1}) {
            auto p = spec;
            p.regimes[j].noise_weight *= f;
            EXPECT_LT(conditional_log_likelihood(p, path.x, reg), best);
        }
    }
}

TEST(Likelihood, ShiftedInterceptLosesLinearlyInLength) {
    const auto doc = preset("m2");
    auto shifted = doc.spec;
    for (auto& r : shifted.regimes) r.intercept += 1.0;
    double gap_short = 0.0, gap_long = 0.0;
    int wins = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        auto rng = core::replication_rng(11, static_cast<std::uint64_t>(rep));
        const auto path = core::simulate_tar(doc.spec, doc.z, 2000, 300, rng);
        const auto reg = regimes_from_z(doc.spec, path.z);
        const std::span<const double> x(path.x);
        const std::span<const std::size_t> r(reg);
        const double g1 = conditional_log_likelihood(doc.spec, x.first(1000), r.first(1000)) -
                          conditional_log_likelihood(shifted, x.first(1000), r.first(1000));
        const double g2 = conditional_log_likelihood(doc.spec, x, r) - conditional_log_likelihood(shifted, x, r);
        wins += g1 > 0.0 && g2 > 0.0;
        gap_short += g1;
        gap_long += g2;
    }
    EXPECT_EQ(wins, reps);
    EXPECT_NEAR(gap_long / gap_short, 2.0, 0.05);
}

TEST(Likelihood, ZeroNoiseWeightIsRejected) {
    core::TarSpec s;
    s.regimes = {{0.0, {}, 0.0}};
    const std::vector<double> x{1.0, 2.0};
    const std::vector<std::size_t> reg{0, 0};
    try {
        pseudo_residuals(s, x, reg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ZeroNoiseWeight);
    }
    EXPECT_THROW(conditional_log_likelihood(s, x, reg), Error);
}

TEST(PseudoResiduals, StandardizedUnderTheTrueSpec) {
    for (const char* name : {"m1", "m2", "m3"}) {
        const auto doc = preset(name);
        const auto path = simulate_preset(name, 1000, 21);
        const auto e = pseudo_residuals(doc.spec, path.x, regimes_from_z(doc.spec, path.z));
        EXPECT_EQ(e.size(), 1000 - doc.spec.max_order());
        EXPECT_GT(stats::mean(e), -0.1) << name;
        EXPECT_LT(stats::mean(e), 0.1) << name;
        EXPECT_GT(stats::variance(e), 0.9) << name;
        EXPECT_LT(stats::variance(e), 1.1) << name;
    }
}

TEST(PseudoResiduals, MisspecifiedCoefficientFailsLjungBox) {
    core::TarSpec truth;
    truth.regimes = {{0.0, {0.6}, 1.0}};
    auto wrong = truth;
    wrong.regimes[0].ar = {0.2};
    int rejections = 0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        auto rng = core::replication_rng(5, static_cast<std::uint64_t>(rep));
        const auto path = core::simulate_tar(truth, core::ZProcessSpec{core::GaussianAR1{}}, 1000, 100, rng);
        const auto e = pseudo_residuals(wrong, path.x, regimes_from_z(wrong, path.z));
        rejections += ljung_box(e, 10).p_value < 0.05;
    }
    EXPECT_GT(rejections, 80);
}

TEST(Nonlinearity, ConstantSeriesIsSingular) {
    const std::vector<double> x(100, 1.0);
    std::vector<double> z(100);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::sin(static_cast<double>(i));
    try {
        nonlinearity_test(x, z, 2, {0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularDesign);
    }
}

TEST(Nonlinearity, SizeUnderLinearAR2) {
    int rejections = 0;
    const int reps = 500;
    double mean_p = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
        auto rng = core::replication_rng(17, static_cast<std::uint64_t>(rep));
        const auto x = ar_path({0.5, -0.3}, 300, rng);
        const auto z = gaussian_noise(300, rng);
        const auto r = nonlinearity_test(x, z, 2, {0});
        rejections += r.p_value < 0.05;
        mean_p += r.p_value / reps;
    }
    EXPECT_NEAR(rejections / static_cast<double>(reps), 0.05, 0.02);
    EXPECT_NEAR(mean_p, 0.5, 0.05);
}

TEST(Nonlinearity, PowerAgainstSecondModel) {
    int rejections = 0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        const auto doc = preset("m2");
        auto rng = core::replication_rng(19, static_cast<std::uint64_t>(rep));
        const auto path = core::simulate_tar(doc.spec, doc.z, 300, 300, rng);
        rejections += nonlinearity_test(path.x, path.z, 3, {0}).p_value < 0.05;
    }
    EXPECT_GT(rejections, 0.9 * reps);
}

TEST(Identify, RecoversFirstModelStructure) {
    const auto doc = preset("m1");
    int hits = 0;
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        auto rng = core::replication_rng(23, static_cast<std::uint64_t>(rep));
        const auto path = core::simulate_tar(doc.spec, doc.z, 2000, 300, rng);
        const auto res = identify_structure(path.x, path.z);
        ASSERT_EQ(res.best.structure.l, 2u);
        const double lo = stats::quantile(path.z, 0.4);
        const double hi = stats::quantile(path.z, 0.6);
        EXPECT_GE(res.best.structure.thresholds[0], lo);
        EXPECT_LE(res.best.structure.thresholds[0], hi);
        hits += res.best.structure.orders == std::vector<std::size_t>{0, 1};
        ASSERT_FALSE(res.best_per_l.empty());
        EXPECT_EQ(res.best_per_l[0].structure.l, 1u);
        EXPECT_LT(res.best.naic, res.best_per_l[0].naic);
    }
    EXPECT_GT(hits, reps / 2);
}

TEST(Identify, LinearDataGivesSmallNaicGap) {
    auto rng = core::replication_rng(29, 0);
    const auto x = ar_path({0.5, -0.3}, 2000, rng);
    const auto z = gaussian_noise(2000, rng);
    const auto res = identify_structure(x, z);
    const double gap = res.best_per_l[0].naic - res.best.naic;
    EXPECT_GE(gap, 0.0);  // the l = 2 search nests a split of the baseline
    EXPECT_LT(gap, 0.01);
    EXPECT_EQ(res.best_per_l[0].structure.orders, std::vector<std::size_t>{2});
}

TEST(Identify, EmptyGridHasNoFeasibleCandidate) {
    auto rng = core::replication_rng(31, 0);
    const auto x = gaussian_noise(300, rng);
    const auto z = gaussian_noise(300, rng);
    IdentificationOptions opt;
    opt.threshold_quantiles.clear();
    try {
        identify_structure(x, z, opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoFeasibleCandidate);
    }
}

TEST(Gibbs, DeterministicGivenSeed) {
    const auto path = simulate_preset("m1", 500, 2);
    GibbsOptions opt{600, 100, 9};
    const auto a = fit_gibbs(path.x, path.z, m1_structure(), std::nullopt, opt);
    const auto b = fit_gibbs(path.x, path.z, m1_structure(), std::nullopt, opt);
    EXPECT_EQ(a.draws, b.draws);
    EXPECT_EQ(a.draws.rows(), 600);
    EXPECT_EQ(a.names.size(), 5u);
    EXPECT_EQ(a.names[0], "a0^(1)");
    EXPECT_EQ(a.names[4], "h2^(2)");
}

TEST(Gibbs, DogmaticPriorPinsTheMean) {
    const auto doc = preset("m1");
    const auto path = simulate_preset("m1", 500, 4);
    PriorSpec prior = PriorSpec::weakly_informative(m1_structure(), path.x);
    prior.regimes[0].mean = Eigen::VectorXd::Constant(1, 0.6);
    prior.regimes[1].mean = Eigen::Vector2d(0.2, 0.4);
    for (auto& r : prior.regimes) r.cov = 1e-16 * Eigen::MatrixXd::Identity(r.mean.size(), r.mean.size());
    const auto post = fit_gibbs(path.x, path.z, m1_structure(), prior, {2000, 500, 1});
    EXPECT_NEAR(post.summary[static_cast<std::size_t>(post.coef_index(0, 0))].mean, 0.6, 1e-6);
    EXPECT_NEAR(post.summary[static_cast<std::size_t>(post.coef_index(1, 0))].mean, 0.2, 1e-6);
    EXPECT_NEAR(post.summary[static_cast<std::size_t>(post.coef_index(1, 1))].mean, 0.4, 1e-6);
}

TEST(Gibbs, UnvisitedRegimeIsRejected) {
    const auto path = simulate_preset("m1", 300, 5);
    std::vector<double> z(path.z.size());
    for (std::size_t t = 0; t < z.size(); ++t) z[t] = -10.0 - std::abs(path.z[t]);
    try {
        fit_gibbs(path.x, z, m1_structure(), std::nullopt, {200, 100, 1});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyRegime);
    }
}

TEST(Gibbs, SingleRegimeMatchesIntegratedPosterior) {
    // Posterior mean of theta under the independent normal / inverse-gamma prior, computed by
    // integrating E[theta | h^2, y] against p(h^2 | y) on a fine log grid.
    auto rng = core::replication_rng(37, 0);
    const auto x = ar_path({0.4}, 200, rng);
    std::vector<double> xs(x.begin(), x.end());
    for (auto& v : xs) v = 0.3 + v;
    const std::vector<double> z(xs.size(), 0.0);
    StructureCandidate s;
    s.orders = {1};
    PriorSpec prior;
    prior.regimes.push_back({Eigen::Vector2d(0.0, 0.0), 0.05 * Eigen::Matrix2d::Identity(), 3.0, 2.0});

    const auto n = static_cast<Eigen::Index>(xs.size() - 1);
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = xs[static_cast<std::size_t>(i)];
        y(i) = xs[static_cast<std::size_t>(i) + 1];
    }
    const Eigen::Matrix2d v0_inv = prior.regimes[0].cov.inverse();
    const Eigen::Matrix2d xtx = X.transpose() * X;
    const Eigen::Vector2d xty = X.transpose() * y;
    std::vector<double> logw;
    std::vector<Eigen::Vector2d> means;
    for (double lh = std::log(0.3); lh < std::log(3.0); lh += 1e-4) {
        const double h2 = std::exp(lh);
        const Eigen::Matrix2d prec = v0_inv + xtx / h2;
        const Eigen::Vector2d xr = xty / h2;
        const double quad = y.squaredNorm() / h2 - xr.dot(prec.ldlt().solve(xr));
        const double logdet = static_cast<double>(n) * lh + std::log(prec.determinant());
        // log p(y | h2) + log IG(h2; a, b) + log Jacobian of the log grid
        logw.push_back(-0.5 * logdet - 0.5 * quad - (3.0 + 1.0) * lh - 2.0 / h2 + lh);
        means.push_back(prec.ldlt().solve(xr));
    }
    const double top = *std::max_element(logw.begin(), logw.end());
    double total = 0.0;
    Eigen::Vector2d oracle = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < logw.size(); ++i) {
        const double w = std::exp(logw[i] - top);
        total += w;
        oracle += w * means[i];
    }
    oracle /= total;

    const auto post = fit_gibbs(xs, z, s, prior, {20000, 1000, 3});
    for (Eigen::Index c = 0; c < 2; ++c) {
        const Eigen::VectorXd chain = post.draws.col(c).tail(19000);
        // batch-means standard error of the chain mean
        const Eigen::Index batches = 38, size = chain.size() / batches;
        double bm = 0.0;
        for (Eigen::Index b = 0; b < batches; ++b) {
            const double d = chain.segment(b * size, size).mean() - chain.mean();
            bm += d * d;
        }
        const double se = std::sqrt(bm / static_cast<double>(batches - 1) / static_cast<double>(batches));
        EXPECT_NEAR(chain.mean(), oracle(c), 3.0 * se) << c;
    }
    EXPECT_LT(post.split_rhat_variance[0], 1.01);
}

TEST(Gibbs, FirstModelCredibleIntervalsCoverTruth) {
    // Pooled 95% coverage over parameters and replications; a single draw misses 5% of the time.
    const std::vector<double> truth{0.6, 0.49, 0.2, 0.4, 1.21};
    int covered = 0, total = 0;
    double rhat_max = 0.0;
    for (int rep = 0; rep < 40; ++rep) {
        const auto doc = preset("m1");
        auto rng = core::replication_rng(89, static_cast<std::uint64_t>(rep));
        const auto path = core::simulate_tar(doc.spec, doc.z, 2000, 300, rng);
        const auto post = fit_gibbs(path.x, path.z, m1_structure(), std::nullopt,
                                    {2000, 500, static_cast<std::uint64_t>(rep + 1)});
        for (std::size_t i = 0; i < truth.size(); ++i) {
            covered += post.summary[i].lower95 <= truth[i] && truth[i] <= post.summary[i].upper95;
            ++total;
            EXPECT_LE(post.summary[i].lower95, post.summary[i].lower90);
            EXPECT_GE(post.summary[i].upper95, post.summary[i].upper90);
        }
        for (double r : post.split_rhat_variance) rhat_max = std::max(rhat_max, r);
    }
    EXPECT_GE(covered, static_cast<int>(0.9 * total));
    EXPECT_LT(rhat_max, 1.05);
}

TEST(Diagnostics, CorrelogramBasics) {
    auto rng = core::replication_rng(43, 0);
    const auto x = ar_path({0.5}, 5000, rng);
    const auto c = acf_pacf(x, 10);
    EXPECT_EQ(c.acf[0], 1.0);
    EXPECT_NEAR(c.acf[1], 0.5, 0.05);
    EXPECT_NEAR(c.pacf[1], c.acf[1], 1e-15);
    EXPECT_NEAR(c.band, 1.96 / std::sqrt(5000.0), 1e-15);
    EXPECT_THROW(acf_pacf(x, 1250), Error);
}

TEST(Diagnostics, PacfMatchesRegressionOracle) {
    // PACF(k) is the last coefficient of the order-k Yule-Walker system solved from the ACF.
    auto rng = core::replication_rng(47, 0);
    const auto x = ar_path({0.6, -0.3, 0.1}, 1000, rng);
    const auto c = acf_pacf(x, 6);
    for (std::size_t k = 1; k <= 6; ++k) {
        Eigen::MatrixXd R(k, k);
        Eigen::VectorXd r(k);
        for (std::size_t i = 0; i < k; ++i) {
            r(static_cast<Eigen::Index>(i)) = c.acf[i + 1];
            for (std::size_t j = 0; j < k; ++j)
                R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c.acf[i > j ? i - j : j - i];
        }
        const Eigen::VectorXd phi = R.ldlt().solve(r);
        EXPECT_NEAR(c.pacf[k], phi(static_cast<Eigen::Index>(k - 1)), 1e-12) << k;
    }
}

TEST(Diagnostics, WhiteNoiseAcfInsideBand) {
    std::size_t outside = 0, total = 0;
    for (int rep = 0; rep < 200; ++rep) {
        auto rng = core::replication_rng(53, static_cast<std::uint64_t>(rep));
        const auto c = acf_pacf(gaussian_noise(500, rng), 20);
        for (std::size_t w = 1; w < c.acf.size(); ++w) outside += std::abs(c.acf[w]) > c.band;
        total += 20;
    }
    EXPECT_NEAR(static_cast<double>(outside) / static_cast<double>(total), 0.05, 0.01);
}

TEST(Diagnostics, CusumSizeAndPower) {
    int cusum_inside = 0, sq_inside = 0;
    const int reps = 1000;
    for (int rep = 0; rep < reps; ++rep) {
        auto rng = core::replication_rng(59, static_cast<std::uint64_t>(rep));
        const auto r = cusum_tests(gaussian_noise(200, rng));
        cusum_inside += r.cusum.inside;
        sq_inside += r.cusumsq.inside;
    }
    EXPECT_NEAR(cusum_inside / static_cast<double>(reps), 0.95, 0.02);
    EXPECT_NEAR(sq_inside / static_cast<double>(reps), 0.95, 0.02);

    int exits = 0;
    for (int rep = 0; rep < 200; ++rep) {
        auto rng = core::replication_rng(61, static_cast<std::uint64_t>(rep));
        auto e = gaussian_noise(500, rng);
        for (std::size_t t = 250; t < e.size(); ++t) e[t] *= std::sqrt(2.0);
        exits += !cusum_tests(e).cusumsq.inside;
    }
    EXPECT_GT(exits, 180);
}

TEST(Diagnostics, CusumRejectsDegenerateInput) {
    try {
        cusum_tests(std::vector<double>(50, 0.3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateResiduals);
    }
    EXPECT_THROW(cusum_tests(std::vector<double>(10, 1.0)), Error);
    auto rng = core::replication_rng(67, 0);
    EXPECT_THROW(cusum_tests(gaussian_noise(100, rng), 0.01), Error);  // CUSUMSQ band is 5% only
}

TEST(Diagnostics, CusumBandsAndEndpoints) {
    auto rng = core::replication_rng(71, 0);
    const auto e = gaussian_noise(100, rng);
    const auto r = cusum_tests(e);
    EXPECT_NEAR(r.cusumsq.statistic.back(), 1.0, 1e-15);
    EXPECT_NEAR(r.cusum.upper.front(), 0.948 * (10.0 + 2.0 / 10.0), 1e-12);
    EXPECT_NEAR(r.cusum.statistic.back(), stats::mean(e) * 100.0 / stats::stddev(e), 1e-10);
    const double c0 = 1.3581015 / 7.0 - 0.6701218 / 49.0 - 0.8858694 / 343.0;
    EXPECT_NEAR(r.cusumsq.upper.front() - 0.01, c0, 1e-12);
}

TEST(Diagnostics, PortmanteauByHand) {
    const std::vector<double> x{1.0, -1.0, 2.0, 0.0, -2.0, 1.0, 0.5, -0.5, 1.5, -1.5};
    const double m = stats::mean(x);
    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) c0 += (x[t] - m) * (x[t] - m);
    for (std::size_t t = 1; t < x.size(); ++t) c1 += (x[t] - m) * (x[t - 1] - m);
    for (std::size_t t = 2; t < x.size(); ++t) c2 += (x[t] - m) * (x[t - 2] - m);
    const double q = 10.0 * 12.0 * ((c1 / c0) * (c1 / c0) / 9.0 + (c2 / c0) * (c2 / c0) / 8.0);
    const auto lb = ljung_box(x, 2);
    EXPECT_NEAR(lb.statistic, q, 1e-12);
    EXPECT_NEAR(lb.p_value, std::exp(-q / 2.0), 1e-12);  // chi^2(2) survival

    const double s = stats::skewness(x), k = stats::kurtosis(x);
    const auto jb = jarque_bera(x);
    EXPECT_NEAR(jb.statistic, 10.0 / 6.0 * (s * s + (k - 3.0) * (k - 3.0) / 4.0), 1e-12);
}

TEST(Diagnostics, ArchLmDetectsVolatilityClustering) {
    auto rng = core::replication_rng(73, 0);
    const auto iid = gaussian_noise(2000, rng);
    std::vector<double> arch(2000);
    std::normal_distribution<double> g;
    double prev = 0.0;
    for (auto& e : arch) {
        e = std::sqrt(0.2 + 0.7 * prev * prev) * g(rng);
        prev = e;
    }
    EXPECT_GT(arch_lm(iid, 5).p_value, 0.01);
    EXPECT_LT(arch_lm(arch, 5).p_value, 1e-6);
}

TEST(Diagnostics, ValidationReportOnTrueSpec) {
    const auto doc = preset("m2");
    const auto path = simulate_preset("m2", 1000, 79);
    const auto e = pseudo_residuals(doc.spec, path.x, regimes_from_z(doc.spec, path.z));
    const auto rep = validate_residuals(e);
    EXPECT_EQ(rep.correlogram.acf.size(), 21u);
    EXPECT_LE(rep.acf_lags_outside_band(), 4u);
    EXPECT_GT(rep.ljung_box.p_value, 0.01);
    EXPECT_EQ(rep.cusum.cusum.statistic.size(), e.size());
    EXPECT_EQ(rep.cusum.cusumsq.upper.size(), e.size());
    const auto j = validation_json(rep);
    EXPECT_TRUE(j.contains("ljung_box"));
}

TEST(Report, PosteriorExports) {
    const auto path = simulate_preset("m1", 400, 83);
    const auto post = fit_gibbs(path.x, path.z, m1_structure(), std::nullopt, {300, 100, 1});
    const auto csv = posterior_draws_csv(post);
    const auto rows = io::parse_csv(csv);
    ASSERT_EQ(rows.size(), 301u);
    EXPECT_EQ(rows[0][0], "iteration");
    EXPECT_EQ(rows[0].size(), 2u + post.names.size());
    const auto j = posterior_summary_json(post);
    EXPECT_EQ(j["regimes"].size(), 2u);
}
