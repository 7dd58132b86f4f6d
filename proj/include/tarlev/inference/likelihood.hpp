#pragma once

#include "tarlev/core/types.hpp"

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace tarlev::inference {

using core::TarSpec;

/// Regime index of every observation of z under the spec's thresholds.
inline std::vector<std::size_t> regimes_from_z(const TarSpec& spec, std::span<const double> z) {
    std::vector<std::size_t> out(z.size());
    for (std::size_t t = 0; t < z.size(); ++t) out[t] = spec.regime_of(z[t]);
    return out;
}

namespace detail {

inline void check_inputs(const TarSpec& spec, std::span<const double> x, std::span<const std::size_t> regimes) {
    spec.validate();
    if (x.size() != regimes.size())
        throw Error(ErrorCode::InvalidArgument, "x and the regime sequence must have equal length");
    for (auto j : regimes)
        if (j >= spec.regime_count()) throw Error(ErrorCode::InvalidArgument, "regime index out of range");
}

// One-step standardized prediction error for observation t (requires t >= max order).
inline double standardized_error(const TarSpec& spec, std::span<const double> x, std::size_t regime, std::size_t t) {
    const auto& r = spec.regimes[regime];
    double pred = r.intercept;
    for (std::size_t i = 0; i < r.ar.size(); ++i) pred += r.ar[i] * x[t - 1 - i];
    return (x[t] - pred) / r.noise_weight;
}

}  // namespace detail

/// Standardized pseudo residuals e_t = (x_t - x_{t|t-1}) / h^(j_t) for t = k..T-1 (0-based),
/// where k is the largest AR order. The one-step predictor uses the observed lags.
inline std::vector<double> pseudo_residuals(const TarSpec& spec, std::span<const double> x,
                                            std::span<const std::size_t> regimes) {
    detail::check_inputs(spec, x, regimes);
    const std::size_t k = spec.max_order();
    if (x.size() <= k) throw Error(ErrorCode::InsufficientHistory, "series is not longer than the largest AR order");
    for (const auto& r : spec.regimes)
        if (!(r.noise_weight > 0.0)) throw Error(ErrorCode::ZeroNoiseWeight, "pseudo residuals need every h > 0");
    std::vector<double> e;
    e.reserve(x.size() - k);
    for (std::size_t t = k; t < x.size(); ++t) e.push_back(detail::standardized_error(spec, x, regimes[t], t));
    return e;
}

/// Gaussian conditional log-likelihood of x given the regime path, conditioning on the
/// first k = max order observations:
///   -((T-k)/2) ln(2 pi) - sum ln h^(j_t) - (1/2) sum e_t^2.
inline double conditional_log_likelihood(const TarSpec& spec, std::span<const double> x,
                                         std::span<const std::size_t> regimes) {
    detail::check_inputs(spec, x, regimes);
    const std::size_t k = spec.max_order();
    if (x.size() <= k) throw Error(ErrorCode::InsufficientData, "need more observations than the largest AR order");

    const double n = static_cast<double>(x.size() - k);
    double log_h = 0.0;
    double sq = 0.0;
    for (std::size_t t = k; t < x.size(); ++t) {
        const double h = spec.regimes[regimes[t]].noise_weight;
        if (!(h > 0.0)) throw Error(ErrorCode::ZeroNoiseWeight, "likelihood needs h > 0 in every visited regime");
        const double e = detail::standardized_error(spec, x, regimes[t], t);
        log_h += std::log(h);
        sq += e * e;
    }
    return -0.5 * n * std::log(2.0 * std::numbers::pi) - log_h - 0.5 * sq;
}

}  // namespace tarlev::inference
