#pragma once

#include "tarlev/error.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace tarlev::stats {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw Error(ErrorCode::InsufficientData, "mean of an empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

/// Central moment of order `k` with divisor n.
inline double central_moment(std::span<const double> x, int k) {
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += std::pow(v - m, k);
    return s / static_cast<double>(x.size());
}

/// Sample variance with divisor n - 1.
inline double variance(std::span<const double> x) {
    if (x.size() < 2) throw Error(ErrorCode::InsufficientData, "variance needs at least two points");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

inline double stddev(std::span<const double> x) { return std::sqrt(variance(x)); }

/// Moment-ratio skewness m3 / m2^(3/2).
inline double skewness(std::span<const double> x) {
    const double m2 = central_moment(x, 2);
    return central_moment(x, 3) / std::pow(m2, 1.5);
}

/// Moment-ratio (non-excess) kurtosis m4 / m2^2.
inline double kurtosis(std::span<const double> x) {
    const double m2 = central_moment(x, 2);
    return central_moment(x, 4) / (m2 * m2);
}

/// Linear-interpolation quantile (type 7).
inline double quantile(std::vector<double> x, double q) {
    if (x.empty()) throw Error(ErrorCode::InsufficientData, "quantile of an empty sample");
    std::sort(x.begin(), x.end());
    const double pos = q * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

}  // namespace tarlev::stats
