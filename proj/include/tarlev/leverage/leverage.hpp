#pragma once

#include "tarlev/core/moments.hpp"
#include "tarlev/core/types.hpp"
#include "tarlev/format.hpp"
#include "tarlev/stats/ols.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace tarlev::leverage {

using core::RegimeProbs;
using core::TarSpec;

/// Var(X_t | x_{t-1}, ..., x_{t-k}) marginalizing the regime:
///   sum p_j h_j^2 + sum p_j m_j^2 - (sum p_j m_j)^2,  m_j = a_0^(j) + sum_i a_i^(j) x_{t-i}.
inline double conditional_variance_type3(const TarSpec& spec, const RegimeProbs& probs,
                                         const std::vector<double>& history) {
    spec.validate();
    probs.validate(spec.regime_count());
    return core::type3_moments(spec, probs.marginal, history).variance;
}

/// With every lag at the common value x the Type III variance is the quadratic
///   c + 2 b x + a x^2.
struct Quadratic {
    double a = 0.0;  // sum p S^2 - (sum p S)^2, S_j = sum_i a_i^(j)
    double b = 0.0;  // sum p a0 S - (sum p a0)(sum p S)
    double c = 0.0;  // sum p h^2 + sum p a0^2 - (sum p a0)^2

    [[nodiscard]] double value(double x) const noexcept { return c + 2.0 * b * x + a * x * x; }
    [[nodiscard]] double derivative(double x) const noexcept { return 2.0 * b + 2.0 * a * x; }
};

inline Quadratic equal_history_quadratic(const TarSpec& spec, const RegimeProbs& probs) {
    spec.validate();
    probs.validate(spec.regime_count());
    double pa0 = 0.0, ps = 0.0, pa0s = 0.0, ps2 = 0.0, pa02 = 0.0, ph2 = 0.0;
    for (std::size_t j = 0; j < spec.regime_count(); ++j) {
        const auto& r = spec.regimes[j];
        const double p = probs.marginal[j];
        const double s = r.ar_sum();
        pa0 += p * r.intercept;
        ps += p * s;
        pa0s += p * r.intercept * s;
        ps2 += p * s * s;
        pa02 += p * r.intercept * r.intercept;
        ph2 += p * r.noise_weight * r.noise_weight;
    }
    return {ps2 - ps * ps, pa0s - pa0 * ps, ph2 + pa02 - pa0 * pa0};
}

/// First derivative of the equal-history Type III variance with respect to x*.
inline double variance_slope(const TarSpec& spec, const RegimeProbs& probs, double x_star) {
    return equal_history_quadratic(spec, probs).derivative(x_star);
}

inline constexpr double kDegenerateDenominator = 1e-14;

struct XStarMin {
    double value = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false;
};

/// Root of the first derivative:
///   x*_min = [(sum p a0)(sum p S) - sum p a0 S] / [sum p S^2 - (sum p S)^2].
/// Flagged degenerate when the denominator is below 1e-14.
inline XStarMin x_star_min(const TarSpec& spec, const RegimeProbs& probs) {
    const auto q = equal_history_quadratic(spec, probs);
    XStarMin out;
    if (q.a < kDegenerateDenominator) {
        out.degenerate = true;
        return out;
    }
    out.value = -q.b / q.a;
    return out;
}

struct ConvexityCheck {
    double second_derivative = 0.0;
    bool sufficient_condition_holds = false;  // sum_{i != j} p_i p_j S_i S_j <= 0
    bool convex = false;
};

/// Second derivative 2[sum p S^2 - (sum p S)^2], constant in x*. The cross-product condition
/// runs over i != j: the full double sum equals (sum p S)^2 and would hold only when it
/// vanishes. With the cross terms nonpositive the second derivative is at least
/// 2 sum p(1-p) S^2. The condition is sufficient only; `convex` can hold without it.
inline ConvexityCheck convexity_check(const TarSpec& spec, const RegimeProbs& probs) {
    const auto q = equal_history_quadratic(spec, probs);
    double cross = 0.0;
    for (std::size_t i = 0; i < spec.regime_count(); ++i)
        for (std::size_t j = 0; j < spec.regime_count(); ++j)
            if (i != j) cross += probs.marginal[i] * probs.marginal[j] * spec.regimes[i].ar_sum() * spec.regimes[j].ar_sum();
    ConvexityCheck out;
    out.second_derivative = 2.0 * q.a;
    out.sufficient_condition_holds = cross <= 0.0;
    out.convex = out.second_derivative > 0.0;
    return out;
}

struct NicCurve {
    std::vector<double> grid;
    std::vector<double> volatility;
    XStarMin x_star_min;
    ConvexityCheck convexity;
    bool convex = false;
    bool leverage_detected = false;  // x*_min > 0 on a convex curve
};

/// `points` equally spaced values from lo to hi; symmetric ranges give exactly symmetric grids.
inline std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
    if (points < 2 || !(hi > lo)) throw Error(ErrorCode::InvalidArgument, "grid needs lo < hi and at least two points");
    std::vector<double> g(points);
    const double n = static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double w = static_cast<double>(i);
        g[i] = ((n - w) * lo + w * hi) / n;
    }
    return g;
}

/// 401 points over [-0.10, 0.10].
inline std::vector<double> default_nic_grid() { return linear_grid(-0.10, 0.10, 401); }

/// News impact curve: volatility sqrt(Var(X_t | x_{t-i} = x* for every lag)) over the grid.
inline NicCurve nic_curve(const TarSpec& spec, const RegimeProbs& probs,
                          const std::vector<double>& grid = default_nic_grid()) {
    if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "NIC grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "NIC grid must be strictly increasing");
    NicCurve out;
    out.grid = grid;
    const std::size_t k = spec.max_order();
    for (double x : grid) {
        const std::vector<double> history(k, x);
        out.volatility.push_back(std::sqrt(conditional_variance_type3(spec, probs, history)));
    }
    out.x_star_min = x_star_min(spec, probs);
    out.convexity = convexity_check(spec, probs);
    out.convex = out.convexity.convex;
    out.leverage_detected = out.convex && !out.x_star_min.degenerate && out.x_star_min.value > 0.0;
    return out;
}

struct ElasticityFit {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double t_alpha0 = 0.0;
    double t_alpha1 = 0.0;
    double p_alpha1 = 1.0;
    double residual_sd = 0.0;
    std::size_t n = 0;

    /// Negative and significant elasticity.
    [[nodiscard]] bool leverage(double level = 0.05) const noexcept { return alpha1 < 0.0 && p_alpha1 < level; }
};

/// OLS of ln(sigma_t / sigma_{t-1}) on (1, r_{t-1}) with classical standard errors.
inline ElasticityFit leverage_elasticity(std::span<const double> volatility, std::span<const double> returns) {
    if (volatility.size() != returns.size()) throw Error(ErrorCode::InvalidArgument, "series must be aligned");
    if (volatility.size() < 10) throw Error(ErrorCode::InsufficientData, "elasticity regression needs at least 10 points");
    for (double s : volatility)
        if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorCode::NonPositiveVolatility, "volatility must be positive");
    const auto n = static_cast<Eigen::Index>(volatility.size() - 1);
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto t = static_cast<std::size_t>(i) + 1;
        X(i, 0) = 1.0;
        X(i, 1) = returns[t - 1];
        y(i) = std::log(volatility[t] / volatility[t - 1]);
    }
    const double rmean = X.col(1).mean();
    if (!((X.col(1).array() - rmean).abs().maxCoeff() > 0.0))
        throw Error(ErrorCode::DegenerateRegressor, "lagged returns have zero variance");

    ElasticityFit out;
    out.n = static_cast<std::size_t>(n);
    if (y.cwiseAbs().maxCoeff() == 0.0) return out;  // constant volatility: exact zero fit
    const auto fit = stats::ols(X, y);
    out.alpha0 = fit.coef(0);
    out.alpha1 = fit.coef(1);
    out.residual_sd = fit.sigma;
    if (fit.sigma > 0.0) {
        out.t_alpha0 = fit.t_stat(0);
        out.t_alpha1 = fit.t_stat(1);
        out.p_alpha1 = stats::t_two_sided(out.t_alpha1, static_cast<double>(n - 2));
    } else {
        out.t_alpha0 = out.alpha0 == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), out.alpha0);
        out.t_alpha1 = out.alpha1 == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), out.alpha1);
        out.p_alpha1 = out.alpha1 == 0.0 ? 1.0 : 0.0;
    }
    return out;
}

/// Volatility path sqrt(Var(X_t | past)) of a series under a fitted spec, for t = k..T-1.
inline std::vector<double> type3_volatility_path(const TarSpec& spec, const RegimeProbs& probs,
                                                 std::span<const double> x) {
    const std::size_t k = spec.max_order();
    std::vector<double> out;
    std::vector<double> history(k);
    for (std::size_t t = k; t < x.size(); ++t) {
        for (std::size_t i = 0; i < k; ++i) history[i] = x[t - 1 - i];
        out.push_back(std::sqrt(conditional_variance_type3(spec, probs, history)));
    }
    return out;
}

/// x_star,volatility
inline std::string nic_csv(const NicCurve& c) {
    std::ostringstream os;
    os << "x_star,volatility\n";
    for (std::size_t i = 0; i < c.grid.size(); ++i)
        os << format_double(c.grid[i]) << ',' << format_double(c.volatility[i]) << '\n';
    return os.str();
}

inline nlohmann::json leverage_json(const NicCurve& c) {
    using nlohmann::json;
    return {{"x_star_min", c.x_star_min.degenerate ? json(nullptr) : json(c.x_star_min.value)},
            {"degenerate", c.x_star_min.degenerate},
            {"second_derivative", c.convexity.second_derivative},
            {"convex", c.convex},
            {"sufficient_condition", c.convexity.sufficient_condition_holds},
            {"leverage_detected", c.leverage_detected}};
}

inline nlohmann::json elasticity_json(const ElasticityFit& f) {
    return {{"alpha0", {{"estimate", f.alpha0}, {"t_statistic", f.t_alpha0}}},
            {"alpha1", {{"estimate", f.alpha1}, {"t_statistic", f.t_alpha1}, {"p_value", f.p_alpha1}}},
            {"residual_sd", f.residual_sd},
            {"n", f.n},
            {"leverage", f.leverage()}};
}

}  // namespace tarlev::leverage
