#include "helpers.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

using namespace tarlev;
using namespace tarlev::core;
using tarlev::testing::preset;

namespace {

TarSpec two_regime(std::vector<double> ar1, std::vector<double> ar2) {
    TarSpec s;
    s.thresholds = {0.0};
    s.regimes = {{0.5, std::move(ar1), 1.0}, {-0.5, std::move(ar2), 2.0}};
    return s;
}

// Standardized moments of the normal mixture sum p_j N(m_j, s_j^2) by adaptive quadrature.
struct MixtureMoments {
    double mean, variance, skewness, kurtosis;
};

MixtureMoments integrate_mixture(const std::vector<double>& p, const std::vector<double>& m,
                                 const std::vector<double>& s2) {
    auto density = [&](double x) {
        double f = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j)
            f += p[j] * std::exp(-0.5 * (x - m[j]) * (x - m[j]) / s2[j]) / std::sqrt(2.0 * std::numbers::pi * s2[j]);
        return f;
    };
    using Q = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double inf = std::numeric_limits<double>::infinity();
    const double mu = Q::integrate([&](double x) { return x * density(x); }, -inf, inf, 15, 1e-13);
    auto central = [&](int k) {
        return Q::integrate([&](double x) { return std::pow(x - mu, k) * density(x); }, -inf, inf, 15, 1e-13);
    };
    const double v = central(2);
    return {mu, v, central(3) / std::pow(v, 1.5), central(4) / (v * v)};
}

}  // namespace

TEST(TarSpec, ValidationRejectsStructuralErrors) {
    TarSpec s = two_regime({0.3}, {});
    EXPECT_NO_THROW(s.validate());
    auto bad = s;
    bad.thresholds = {};
    EXPECT_THROW(bad.validate(), Error);
    bad = s;
    bad.thresholds = {0.0, 0.0};
    bad.regimes.push_back({});
    EXPECT_THROW(bad.validate(), Error);
    bad = s;
    bad.regimes[0].noise_weight = -1.0;
    try {
        bad.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
    }
    EXPECT_THROW(TarSpec{}.validate(), Error);
}

TEST(TarSpec, RegimeMembershipIsHalfOpenFromBelow) {
    TarSpec s;
    s.thresholds = {-1.0, 1.0};
    s.regimes.resize(3);
    EXPECT_EQ(s.regime_of(-1.0), 0u);  // (-inf, -1]
    EXPECT_EQ(s.regime_of(std::nextafter(-1.0, 0.0)), 1u);
    EXPECT_EQ(s.regime_of(1.0), 1u);
    EXPECT_EQ(s.regime_of(std::nextafter(1.0, 2.0)), 2u);
    EXPECT_EQ(s.regime_of(-1e300), 0u);
    EXPECT_EQ(s.regime_of(1e300), 2u);
}

TEST(ZProcess, Validation) {
    EXPECT_THROW((ZProcessSpec{GaussianAR1{1.0, 1.0}}.validate()), Error);
    EXPECT_THROW((ZProcessSpec{GaussianAR1{0.5, 0.0}}.validate()), Error);
    EXPECT_THROW((ZProcessSpec{ObservedZ{}}.validate()), Error);
    EXPECT_DOUBLE_EQ((GaussianAR1{0.6, 1.0}.stationary_variance()), 1.5625);
}

TEST(Stationarity, QuadraticRootsOfSecondModel) {
    const auto m2 = preset("m2").spec;
    const auto rep = check_stationarity(m2);
    ASSERT_EQ(rep.regimes[0].roots.size(), 2u);
    // 1 - 0.3 z + 0.4 z^2 = 0: z = (0.3 +- sqrt(0.09 - 1.6)) / 0.8, modulus sqrt(1/0.4)
    for (double m : rep.regimes[0].root_moduli) EXPECT_NEAR(m, std::sqrt(2.5), 1e-12);
    EXPECT_TRUE(rep.regimes[0].stationary);
    EXPECT_TRUE(rep.all_stationary());
}

TEST(Stationarity, TrivialAndUnitRoot) {
    const auto rep = check_stationarity(two_regime({}, {1.0}));
    EXPECT_TRUE(rep.regimes[0].stationary);
    EXPECT_TRUE(rep.regimes[0].roots.empty());
    EXPECT_FALSE(rep.regimes[1].stationary);
    EXPECT_NEAR(rep.regimes[1].root_moduli[0], 1.0, 1e-12);
    EXPECT_FALSE(rep.all_stationary());
    EXPECT_THROW(compute_psi_weights(two_regime({}, {1.0}), 1), Error);
}

TEST(PsiWeights, OrderZero) {
    const auto w = compute_psi_weights(Regime{1.0, {}, 1.0});
    EXPECT_EQ(w.psi, std::vector<double>{1.0});
    EXPECT_EQ(w.psi_sum, 1.0);
    EXPECT_EQ(w.sigma_bar_sq, 1.0);
}

TEST(PsiWeights, GeometricAR1) {
    const auto w = compute_psi_weights(Regime{0.0, {0.5}, 1.0});
    for (std::size_t i = 0; i < w.psi.size(); ++i) EXPECT_DOUBLE_EQ(w.psi[i], std::pow(0.5, static_cast<double>(i)));
    EXPECT_NEAR(w.psi_sum, 2.0, 1e-12);
    EXPECT_NEAR(w.sigma_bar_sq, 4.0 / 3.0, 1e-12);
    // truncation honours the tail bound |psi_M| rho/(1-rho) < tol
    EXPECT_LT(std::abs(w.psi.back()) * 0.5 / 0.5, 1e-12);
}

TEST(PsiWeights, BovespaSecondRegime) {
    const auto w = compute_psi_weights(preset("bovespa-tar").spec, 1);
    EXPECT_NEAR(w.psi_sum, 0.7621, 5e-5);
    EXPECT_NEAR(w.sigma_bar_sq, 1.015, 5e-4);
    EXPECT_GE(w.sigma_bar_sq, 1.0);
}

TEST(BivariateNormal, IndependentCaseFactorizes) {
    for (double a : {-1.5, 0.0, 0.7})
        for (double b : {-0.3, 1.2}) EXPECT_NEAR(bivariate_normal_cdf(a, b, 0.0), normal_cdf(a) * normal_cdf(b), 1e-12);
}

TEST(BivariateNormal, MatchesOneDimensionalIntegral) {
    // P(X <= a, Y <= b) = int_{-inf}^{a} phi(x) Phi((b - rho x)/sqrt(1 - rho^2)) dx
    using Q = boost::math::quadrature::gauss_kronrod<double, 61>;
    for (double rho : {-0.9, -0.4, 0.25, 0.6, 0.95}) {
        for (double a : {-1.0, 0.3, 2.0}) {
            for (double b : {-0.5, 0.8}) {
                const double s = std::sqrt(1.0 - rho * rho);
                const double oracle = Q::integrate(
                    [&](double x) {
                        return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi) * normal_cdf((b - rho * x) / s);
                    },
                    -std::numeric_limits<double>::infinity(), a, 15, 1e-14);
                EXPECT_NEAR(bivariate_normal_cdf(a, b, rho), oracle, 1e-7) << rho << ' ' << a << ' ' << b;
                EXPECT_NEAR(bivariate_normal_cdf(a, b, rho), bivariate_normal_cdf(b, a, rho), 1e-12);
            }
        }
    }
}

TEST(RegimeProbs, FirstModelHasEqualHalves) {
    const auto doc = preset("m1");
    const auto p = doc.probs();
    EXPECT_NEAR(p.marginal[0], 0.5, 1e-15);
    EXPECT_NEAR(p.marginal[1], 0.5, 1e-15);
}

TEST(RegimeProbs, ThirdModelMiddleRegime) {
    const auto p = preset("m3").probs();
    // sd = 1/sqrt(1 - 0.36) = 1.25; P(|Z| <= 1) = 2 Phi(0.8) - 1
    EXPECT_NEAR(p.marginal[1], 2.0 * normal_cdf(0.8) - 1.0, 1e-14);
    EXPECT_NEAR(p.marginal[1], 0.576289, 1e-6);
    EXPECT_NEAR(p.marginal[0], p.marginal[2], 1e-14);
}

TEST(RegimeProbs, JointProbabilitiesAreConsistent) {
    const auto doc = preset("m3");
    const auto p = doc.probs({0, 1, 2, 5});
    for (std::size_t w = 0; w < p.lags.size(); ++w) {
        double total = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            double row = 0.0, col = 0.0;
            for (std::size_t k = 0; k < 3; ++k) {
                row += p.joint[w][j][k];
                col += p.joint[w][k][j];
                if (p.lags[w] == 0 && j != k) {
                    EXPECT_EQ(p.joint[w][j][k], 0.0);
                }
            }
            EXPECT_NEAR(row, p.marginal[j], 1e-7);
            EXPECT_NEAR(col, p.marginal[j], 1e-7);
            total += row;
        }
        EXPECT_NEAR(total, 1.0, 1e-7);
    }
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(p.joint[0][j][j], p.marginal[j]);
}

TEST(RegimeProbs, ObservedFrequencies) {
    const ZProcessSpec z{ObservedZ{{-1.0, 0.5, 0.0, 2.0, -0.2, 0.1}}};
    const auto p = regime_probabilities(z, {0.0}, {1});
    EXPECT_DOUBLE_EQ(p.marginal[0], 0.5);  // -1, 0 (threshold belongs below), -0.2
    // regimes 0 1 0 1 0 1; pairs (t, t-1) alternate (1,0) (0,1) (1,0) (0,1) (1,0)
    EXPECT_DOUBLE_EQ(p.joint[0][1][0], 0.6);
    EXPECT_DOUBLE_EQ(p.joint[0][0][1], 0.4);
    EXPECT_DOUBLE_EQ(p.joint[0][1][1], 0.0);
    EXPECT_DOUBLE_EQ(p.joint[0][0][0], 0.0);
}

TEST(RegimeProbs, UnvisitedRegimeIsDegenerate) {
    try {
        regime_probabilities(ZProcessSpec{ObservedZ{{1.0, 2.0}}}, {0.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateRegime);
    }
}

TEST(Moments, SingleRegimeIsGaussian) {
    TarSpec s;
    s.regimes = {{0.7, {0.4, -0.2}, 1.3}};
    const auto m = unconditional_moments(s, RegimeProbs::from_marginal({1.0}));
    EXPECT_NEAR(m.skewness, 0.0, 1e-12);
    EXPECT_NEAR(m.kurtosis, 3.0, 1e-12);
    EXPECT_NEAR(m.mean, 0.7 / 0.8, 1e-12);
}

TEST(Moments, FrozenValuesForSimulationModels) {
    // Frozen from the quadrature oracle below.
    const auto m1 = unconditional_moments(preset("m1").spec, preset("m1").probs());
    EXPECT_NEAR(m1.skewness, -0.19504, 5e-6);
    EXPECT_NEAR(m1.kurtosis, 3.70051, 5e-6);
    const auto m2 = unconditional_moments(preset("m2").spec, preset("m2").probs());
    EXPECT_NEAR(m2.skewness, 0.47520, 5e-6);
    EXPECT_NEAR(m2.kurtosis, 2.94026, 5e-6);
    const auto doc3 = preset("m3");
    const auto m3 = unconditional_moments(doc3.spec, doc3.probs());
    EXPECT_NEAR(m3.skewness, -1.12133, 5e-6);
    EXPECT_NEAR(m3.kurtosis, 6.34424, 5e-6);
    const double tail = 0.2;
    const auto m3s = unconditional_moments(doc3.spec, RegimeProbs::from_marginal({tail, 0.6, tail}));
    EXPECT_NEAR(m3s.skewness, -1.15744, 5e-6);
    EXPECT_NEAR(m3s.kurtosis, 6.60205, 5e-6);
}

TEST(Moments, AgreeWithMixtureQuadrature) {
    for (const char* name : {"m1", "m2", "m3", "bovespa-tar"}) {
        const auto doc = preset(name);
        const auto probs = doc.probs();
        const auto m = unconditional_moments(doc.spec, probs);
        std::vector<double> mu, s2;
        for (const auto& r : m.per_regime) {
            mu.push_back(r.mean);
            s2.push_back(r.variance);
        }
        const auto q = integrate_mixture(probs.marginal, mu, s2);
        EXPECT_NEAR(m.mean, q.mean, 1e-9 * (1.0 + std::abs(q.mean))) << name;
        EXPECT_NEAR(m.variance, q.variance, 1e-9 * q.variance) << name;
        EXPECT_NEAR(m.skewness, q.skewness, 1e-7) << name;
        EXPECT_NEAR(m.kurtosis, q.kurtosis, 1e-7) << name;
    }
}

TEST(Moments, BovespaTables) {
    const auto doc = preset("bovespa-tar");
    const auto m = unconditional_moments(doc.spec, doc.probs());
    EXPECT_NEAR(m.mean, -0.0005, 5e-5);
    EXPECT_NEAR(m.variance, 0.0002, 5e-5);
    EXPECT_NEAR(m.skewness, -0.0218, 5e-4);
    EXPECT_NEAR(m.kurtosis, 2.9597, 1e-3);
    EXPECT_NEAR(m.per_regime[0].mean, -0.0059, 5e-5);
    EXPECT_NEAR(m.per_regime[1].mean, 0.0048, 5e-5);
}

TEST(Moments, InvariantsOnRandomSpecs) {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t l = 1 + rep % 4;
        auto s = tarlev::testing::random_spec(rng, l);
        const auto p = RegimeProbs::from_marginal(tarlev::testing::random_probs(rng, l));
        const auto m = unconditional_moments(s, p);
        double total = 0.0, between = 0.0, third = 0.0;
        for (std::size_t j = 0; j < l; ++j) {
            const auto& r = m.per_regime[j];
            const double d = r.mean - m.mean;
            total += p.marginal[j] * r.variance;
            between += p.marginal[j] * d * d;
            third += p.marginal[j] * d * (3.0 * r.variance + d * d);
            EXPECT_NEAR(r.second_moment, r.variance + r.mean * r.mean, 1e-12);
        }
        EXPECT_NEAR(m.variance, total + between, 1e-10);
        if (std::abs(third) > 1e-12) {
            EXPECT_EQ(std::signbit(m.skewness), std::signbit(third));
        }
        EXPECT_GT(m.kurtosis, 0.0);

        // shift every regime mean by c
        const double c = 0.37;
        auto shifted = s;
        for (auto& r : shifted.regimes) r.intercept += c * r.phi_at_one();
        const auto ms = unconditional_moments(shifted, p);
        EXPECT_NEAR(ms.mean, m.mean + c, 1e-10);
        EXPECT_NEAR(ms.variance, m.variance, 1e-10);
        EXPECT_NEAR(ms.skewness, m.skewness, 1e-10);
        EXPECT_NEAR(ms.kurtosis, m.kurtosis, 1e-10);
    }
}

TEST(Moments, NonStationaryRegimeRejected) {
    const auto s = two_regime({}, {1.2});
    EXPECT_THROW(unconditional_moments(s, RegimeProbs::from_marginal({0.5, 0.5})), Error);
}

TEST(ConditionalMoments, BovespaRegimes) {
    const auto doc = preset("bovespa-tar");
    const auto c = conditional_moments(doc.spec, doc.probs(), std::vector<double>(6, 0.0));
    EXPECT_NEAR(c.type1[0].mean, -0.0059, 1e-12);
    EXPECT_NEAR((*c.type2)[0].variance, 1.7418e-4, 1e-15);
    EXPECT_NEAR(c.type3->mean, 0.5 * (-0.0059) + 0.5 * 0.0063, 1e-15);
    // mixture of N(-0.0059, h1^2) and N(0.0063, h2^2) with equal weights
    const double v = 0.5 * (1.7418e-4 + 1.6405e-4) + 0.25 * (0.0063 + 0.0059) * (0.0063 + 0.0059);
    EXPECT_NEAR(c.type3->variance, v, 1e-15);
    EXPECT_NEAR(c.type3->variance, 2.0633e-4, 5e-9);
    EXPECT_THROW(conditional_moments(doc.spec, doc.probs(), std::vector<double>(5, 0.0)), Error);
}

TEST(ConditionalMoments, SingleRegimeCollapse) {
    TarSpec s;
    s.regimes = {{0.1, {0.5}, 2.0}};
    const auto c = conditional_moments(s, RegimeProbs::from_marginal({1.0}), std::vector<double>{0.4});
    EXPECT_DOUBLE_EQ(c.type3->mean, (*c.type2)[0].mean);
    EXPECT_DOUBLE_EQ(c.type3->variance, (*c.type2)[0].variance);
}

TEST(Autocovariance, LagZeroIsVariance) {
    for (const char* name : {"m1", "m2", "m3"}) {
        const auto doc = preset(name);
        const auto g = autocovariance(doc.spec, doc.z, 3);
        const auto m = unconditional_moments(doc.spec, doc.probs());
        EXPECT_NEAR(g[0], m.variance, 1e-8) << name;
    }
}

TEST(Autocovariance, WhiteNoise) {
    TarSpec s;
    s.regimes = {{0.0, {}, 1.7}};
    const auto g = autocovariance(s, ZProcessSpec{GaussianAR1{0.3, 1.0}}, 4);
    EXPECT_NEAR(g[0], 1.7 * 1.7, 1e-12);
    for (std::size_t w = 1; w < g.size(); ++w) EXPECT_NEAR(g[w], 0.0, 1e-12);
}

TEST(Autocovariance, SingleRegimeAR1) {
    TarSpec s;
    s.regimes = {{0.2, {0.6}, 1.0}};
    const auto g = autocovariance(s, ZProcessSpec{GaussianAR1{0.0, 1.0}}, 3);
    for (std::size_t w = 0; w < g.size(); ++w)
        EXPECT_NEAR(g[w], std::pow(0.6, static_cast<double>(w)) / (1.0 - 0.36), 1e-10);
}

TEST(Simulate, DeterministicGivenSeed) {
    const auto doc = preset("m3");
    const auto a = simulate_tar(doc.spec, doc.z, 500, 300, 99u);
    const auto b = simulate_tar(doc.spec, doc.z, 500, 300, 99u);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.z, b.z);
    EXPECT_EQ(a.regime, b.regime);
    EXPECT_EQ(a.x.size(), 500u);
    const auto c = simulate_tar(doc.spec, doc.z, 500, 300, 100u);
    EXPECT_NE(a.x, c.x);
    for (std::size_t t = 0; t < a.z.size(); ++t) EXPECT_EQ(a.regime[t], doc.spec.regime_of(a.z[t]));
}

TEST(Simulate, NoiselessProcessFollowsIntercepts) {
    TarSpec s;
    s.thresholds = {0.0};
    s.regimes = {{-2.0, {}, 0.0}, {3.0, {}, 0.0}};
    const auto p = simulate_tar(s, ZProcessSpec{GaussianAR1{0.5, 1.0}}, 200, 10, 1u);
    for (std::size_t t = 0; t < p.x.size(); ++t) EXPECT_EQ(p.x[t], s.regimes[p.regime[t]].intercept);
}

TEST(Simulate, ReplicationStreamsAreIndependentOfOrder) {
    auto a = replication_rng(42, 5);
    auto b = replication_rng(42, 5);
    auto c = replication_rng(42, 6);
    EXPECT_EQ(a(), b());
    EXPECT_NE(b(), c());
}

TEST(Simulate, RejectsNonStationary) {
    EXPECT_THROW(simulate_tar(two_regime({1.1}, {}), ZProcessSpec{GaussianAR1{}}, 10, 0, 1u), Error);
}

TEST(Json, RoundTripAndNoiseVariants) {
    for (const auto& p : io::kPresets) {
        if (p.kind != "tar") continue;
        const auto doc = preset(std::string(p.name));
        const auto again = core::model_from_json(core::model_to_json(doc));
        ASSERT_EQ(again.spec.regimes.size(), doc.spec.regimes.size());
        EXPECT_EQ(again.spec.thresholds, doc.spec.thresholds);
        for (std::size_t j = 0; j < doc.spec.regimes.size(); ++j) {
            EXPECT_EQ(again.spec.regimes[j].ar, doc.spec.regimes[j].ar);
            EXPECT_EQ(again.spec.regimes[j].intercept, doc.spec.regimes[j].intercept);
            EXPECT_EQ(again.spec.regimes[j].noise_weight, doc.spec.regimes[j].noise_weight);
        }
    }
    const auto bov = preset("bovespa-tar");
    EXPECT_DOUBLE_EQ(bov.spec.regimes[0].noise_weight, std::sqrt(1.7418e-4));

    auto j = nlohmann::json::parse(R"({"l":1,"thresholds":[],"regimes":[{"order":0,"intercept":0,"ar":[],"h":1,"h2":1}]})");
    EXPECT_THROW(tar_spec_from_json(j), Error);
    j["regimes"][0].erase("h");
    j["regimes"][0]["h2"] = -1.0;
    EXPECT_THROW(tar_spec_from_json(j), Error);
    j["regimes"][0]["h2"] = 4.0;
    EXPECT_DOUBLE_EQ(tar_spec_from_json(j).regimes[0].noise_weight, 2.0);
    j["regimes"][0]["order"] = 2;
    EXPECT_THROW(tar_spec_from_json(j), Error);
}

TEST(Json, EmbeddedPresetsMatchDataFiles) {
    for (const auto& p : io::kPresets) {
        const auto file = io::read_file(std::string(TARLEV_SOURCE_DIR) + "/data/presets/" + std::string(p.name) + ".json");
        EXPECT_EQ(file, p.json) << p.name;
    }
    EXPECT_THROW(io::find_preset("nope"), Error);
}
