#pragma once

#include "tarlev/core/types.hpp"
#include "tarlev/inference/identify.hpp"
#include "tarlev/stats/descriptive.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace tarlev::inference {

/// Conjugate priors for one regime: theta_j ~ N(mean, cov) and (h^(j))^2 ~ InvGamma(shape, scale).
struct RegimePrior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    double shape = 2.1;
    double scale = 0.1;
};

struct PriorSpec {
    std::vector<RegimePrior> regimes;

    /// theta_j ~ N(0, 10^2 I), h^2 ~ InvGamma(2.1, 0.1 * var(x)).
    static PriorSpec weakly_informative(const StructureCandidate& s, std::span<const double> x) {
        PriorSpec p;
        const double v = stats::variance(x);
        for (auto k : s.orders) {
            const auto dim = static_cast<Eigen::Index>(k + 1);
            p.regimes.push_back({Eigen::VectorXd::Zero(dim), 100.0 * Eigen::MatrixXd::Identity(dim, dim), 2.1, 0.1 * v});
        }
        return p;
    }

    void validate(const StructureCandidate& s) const {
        if (regimes.size() != s.l) throw Error(ErrorCode::InvalidArgument, "one prior per regime is required");
        for (std::size_t j = 0; j < s.l; ++j) {
            const auto& r = regimes[j];
            const auto dim = static_cast<Eigen::Index>(s.orders[j] + 1);
            if (r.mean.size() != dim || r.cov.rows() != dim || r.cov.cols() != dim)
                throw Error(ErrorCode::InvalidArgument, "prior dimension does not match the regime order");
            if (!r.cov.isApprox(r.cov.transpose()) || r.cov.llt().info() != Eigen::Success)
                throw Error(ErrorCode::InvalidArgument, "prior covariance must be symmetric positive definite");
            if (!(r.shape > 0.0) || !(r.scale > 0.0))
                throw Error(ErrorCode::InvalidArgument, "inverse-gamma hyperparameters must be positive");
        }
    }
};

struct ParameterSummary {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;  // reported as the typical deviation
    double lower90 = 0.0;
    double upper90 = 0.0;
    double lower95 = 0.0;
    double upper95 = 0.0;
};

struct PosteriorDraws {
    StructureCandidate structure;
    std::size_t iterations = 0;
    std::size_t burn_in = 0;
    std::vector<std::string> names;  // a0^(1), a1^(1), ..., h2^(1), a0^(2), ...
    Eigen::MatrixXd draws;           // iterations x parameters, including burn-in rows
    std::vector<ParameterSummary> summary;
    std::vector<double> split_rhat_variance;  // per regime, on (h^(j))^2

    /// Column of a0^(j) / a_i^(j) (i = 0 is the intercept).
    [[nodiscard]] Eigen::Index coef_index(std::size_t regime, std::size_t i) const {
        std::size_t col = 0;
        for (std::size_t j = 0; j < regime; ++j) col += structure.orders[j] + 2;
        return static_cast<Eigen::Index>(col + i);
    }
    [[nodiscard]] Eigen::Index variance_index(std::size_t regime) const {
        return coef_index(regime, structure.orders[regime] + 1);
    }

    /// TarSpec at the posterior means, h taken as sqrt of the mean variance.
    [[nodiscard]] core::TarSpec posterior_mean_spec() const {
        core::TarSpec spec;
        spec.thresholds = structure.thresholds;
        for (std::size_t j = 0; j < structure.l; ++j) {
            core::Regime r;
            r.intercept = summary[static_cast<std::size_t>(coef_index(j, 0))].mean;
            for (std::size_t i = 1; i <= structure.orders[j]; ++i)
                r.ar.push_back(summary[static_cast<std::size_t>(coef_index(j, i))].mean);
            r.noise_weight = std::sqrt(summary[static_cast<std::size_t>(variance_index(j))].mean);
            spec.regimes.push_back(std::move(r));
        }
        return spec;
    }
};

namespace detail {

// Gelman-Rubin statistic on the two halves of a single chain.
inline double split_rhat(const Eigen::VectorXd& chain) {
    const Eigen::Index half = chain.size() / 2;
    if (half < 2) return std::numeric_limits<double>::quiet_NaN();
    const Eigen::VectorXd a = chain.head(half);
    const Eigen::VectorXd b = chain.segment(half, half);
    const double n = static_cast<double>(half);
    const double ma = a.mean();
    const double mb = b.mean();
    const double va = (a.array() - ma).square().sum() / (n - 1.0);
    const double vb = (b.array() - mb).square().sum() / (n - 1.0);
    const double w = 0.5 * (va + vb);
    const double grand = 0.5 * (ma + mb);
    const double between = n * ((ma - grand) * (ma - grand) + (mb - grand) * (mb - grand));
    const double var_plus = (n - 1.0) / n * w + between / n;
    return w > 0.0 ? std::sqrt(var_plus / w) : 1.0;
}

inline ParameterSummary summarize(const std::string& name, const Eigen::VectorXd& v) {
    std::vector<double> xs(v.data(), v.data() + v.size());
    ParameterSummary s;
    s.name = name;
    s.mean = stats::mean(xs);
    s.sd = xs.size() > 1 ? stats::stddev(xs) : 0.0;
    s.lower90 = stats::quantile(xs, 0.05);
    s.upper90 = stats::quantile(xs, 0.95);
    s.lower95 = stats::quantile(xs, 0.025);
    s.upper95 = stats::quantile(xs, 0.975);
    return s;
}

}  // namespace detail

struct GibbsOptions {
    std::size_t iterations = 6000;
    std::size_t burn_in = 1000;
    std::uint64_t seed = 1;
};

/// Gibbs sampler for the non-structural parameters given the structure.
///
/// Alternates, per regime, theta_j | h_j^2 ~ N(V (V0^-1 m0 + X'y / h^2), V) with
/// V = (V0^-1 + X'X / h^2)^-1, and h_j^2 | theta_j ~ InvGamma(a0 + n_j / 2, b0 + SSR_j / 2).
/// The regression uses t = k..T-1 with k the largest order so every regime sees the same
/// conditioning sample as the conditional likelihood.
inline PosteriorDraws fit_gibbs(std::span<const double> x, std::span<const double> z, const StructureCandidate& s,
                                const std::optional<PriorSpec>& prior_in = std::nullopt,
                                const GibbsOptions& opt = {}) {
    s.validate();
    if (x.size() != z.size()) throw Error(ErrorCode::InvalidArgument, "x and z must be aligned");
    if (opt.iterations <= opt.burn_in) throw Error(ErrorCode::InvalidArgument, "iterations must exceed burn_in");
    const PriorSpec prior = prior_in ? *prior_in : PriorSpec::weakly_informative(s, x);
    prior.validate(s);

    const std::size_t k = s.max_order();
    if (x.size() <= k) throw Error(ErrorCode::InsufficientData, "series shorter than the largest order");

    std::vector<std::vector<std::size_t>> times(s.l);
    for (std::size_t t = k; t < x.size(); ++t) times[s.regime_of(z[t])].push_back(t);

    struct RegimeData {
        Eigen::MatrixXd X;
        Eigen::VectorXd y;
        Eigen::MatrixXd xtx;
        Eigen::VectorXd xty;
        Eigen::MatrixXd prior_prec;
        Eigen::VectorXd prior_shift;  // V0^-1 m0
    };
    std::vector<RegimeData> data(s.l);
    for (std::size_t j = 0; j < s.l; ++j) {
        if (times[j].empty()) throw Error(ErrorCode::EmptyRegime, "regime " + std::to_string(j + 1) + " has no observations");
        const auto n = static_cast<Eigen::Index>(times[j].size());
        const auto p = static_cast<Eigen::Index>(s.orders[j] + 1);
        auto& d = data[j];
        d.X.resize(n, p);
        d.y.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::size_t t = times[j][static_cast<std::size_t>(i)];
            d.X(i, 0) = 1.0;
            for (Eigen::Index lag = 1; lag < p; ++lag) d.X(i, lag) = x[t - static_cast<std::size_t>(lag)];
            d.y(i) = x[t];
        }
        d.xtx = d.X.transpose() * d.X;
        d.xty = d.X.transpose() * d.y;
        d.prior_prec = prior.regimes[j].cov.inverse();
        d.prior_shift = d.prior_prec * prior.regimes[j].mean;
    }

    PosteriorDraws out;
    out.structure = s;
    out.iterations = opt.iterations;
    out.burn_in = opt.burn_in;
    for (std::size_t j = 0; j < s.l; ++j) {
        const auto tag = "^(" + std::to_string(j + 1) + ")";
        for (std::size_t i = 0; i <= s.orders[j]; ++i) out.names.push_back("a" + std::to_string(i) + tag);
        out.names.push_back("h2" + tag);
    }
    out.draws.resize(static_cast<Eigen::Index>(opt.iterations), static_cast<Eigen::Index>(out.names.size()));

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> h2(s.l);
    for (std::size_t j = 0; j < s.l; ++j) {
        const double v = data[j].y.size() > 1
                             ? (data[j].y.array() - data[j].y.mean()).square().sum() / static_cast<double>(data[j].y.size() - 1)
                             : 0.0;
        h2[j] = v > 0.0 ? v : prior.regimes[j].scale;
    }

    for (std::size_t it = 0; it < opt.iterations; ++it) {
        Eigen::Index col = 0;
        for (std::size_t j = 0; j < s.l; ++j) {
            const auto& d = data[j];
            const Eigen::MatrixXd prec = d.prior_prec + d.xtx / h2[j];
            const Eigen::LLT<Eigen::MatrixXd> llt(prec);
            const Eigen::VectorXd mean = llt.solve(d.prior_shift + d.xty / h2[j]);
            Eigen::VectorXd eps(mean.size());
            for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = normal(rng);
            // prec = L L'  =>  L'^-1 eps ~ N(0, prec^-1)
            const Eigen::VectorXd theta = mean + llt.matrixU().solve(eps);

            const double ssr = (d.y - d.X * theta).squaredNorm();
            const double shape = prior.regimes[j].shape + 0.5 * static_cast<double>(d.y.size());
            const double rate = prior.regimes[j].scale + 0.5 * ssr;
            std::gamma_distribution<double> gamma(shape, 1.0 / rate);
            h2[j] = 1.0 / gamma(rng);

            for (Eigen::Index i = 0; i < theta.size(); ++i) out.draws(static_cast<Eigen::Index>(it), col++) = theta(i);
            out.draws(static_cast<Eigen::Index>(it), col++) = h2[j];
        }
    }

    const auto kept = static_cast<Eigen::Index>(opt.iterations - opt.burn_in);
    for (Eigen::Index c = 0; c < out.draws.cols(); ++c)
        out.summary.push_back(detail::summarize(out.names[static_cast<std::size_t>(c)], out.draws.col(c).tail(kept)));
    for (std::size_t j = 0; j < s.l; ++j)
        out.split_rhat_variance.push_back(detail::split_rhat(out.draws.col(out.variance_index(j)).tail(kept)));
    return out;
}

}  // namespace tarlev::inference
