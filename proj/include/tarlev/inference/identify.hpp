#pragma once

#include "tarlev/core/types.hpp"
#include "tarlev/stats/descriptive.hpp"
#include "tarlev/stats/ols.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace tarlev::inference {

struct StructureCandidate {
    std::size_t l = 1;
    std::vector<double> thresholds;
    std::vector<std::size_t> orders;

    void validate() const {
        if (l == 0 || thresholds.size() + 1 != l || orders.size() != l)
            throw Error(ErrorCode::InvalidArgument, "structure needs l-1 thresholds and l orders");
        for (std::size_t i = 1; i < thresholds.size(); ++i)
            if (!(thresholds[i] > thresholds[i - 1]))
                throw Error(ErrorCode::InvalidArgument, "thresholds must be strictly increasing");
    }

    [[nodiscard]] std::size_t regime_of(double z) const noexcept {
        return static_cast<std::size_t>(std::lower_bound(thresholds.begin(), thresholds.end(), z) - thresholds.begin());
    }

    [[nodiscard]] std::size_t max_order() const noexcept {
        std::size_t k = 0;
        for (auto o : orders) k = std::max(k, o);
        return k;
    }
};

struct ScoredCandidate {
    StructureCandidate structure;
    double naic = std::numeric_limits<double>::infinity();
};

struct IdentificationResult {
    ScoredCandidate best;                 // minimum NAIC over l >= 2
    std::vector<ScoredCandidate> best_per_l;  // index 0 is the l = 1 baseline
};

struct IdentificationOptions {
    std::size_t max_l = 2;
    std::size_t max_k = 3;
    std::vector<double> threshold_quantiles = default_quantiles();
    std::size_t min_obs_per_coef = 10;  // regime j needs at least this * (k_j + 1) observations

    static std::vector<double> default_quantiles() {
        std::vector<double> q;
        for (int i = 15; i <= 85; i += 5) q.push_back(i / 100.0);
        return q;
    }
};

namespace detail {

// Best NAIC contribution n_j ln(sigma_j^2) + 2(k_j + 1) over the admissible orders of one
// regime; nullopt when no order meets the sample floor.
inline std::optional<std::pair<std::size_t, double>> best_regime_order(std::span<const double> x,
                                                                       const std::vector<std::size_t>& times,
                                                                       const IdentificationOptions& opt) {
    std::optional<std::pair<std::size_t, double>> best;
    for (std::size_t k = 0; k <= opt.max_k; ++k) {
        if (times.size() < opt.min_obs_per_coef * (k + 1)) break;
        const auto n = static_cast<Eigen::Index>(times.size());
        Eigen::MatrixXd X(n, static_cast<Eigen::Index>(k + 1));
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::size_t t = times[static_cast<std::size_t>(i)];
            X(i, 0) = 1.0;
            for (std::size_t lag = 1; lag <= k; ++lag) X(i, static_cast<Eigen::Index>(lag)) = x[t - lag];
            y(i) = x[t];
        }
        double ssr = 0.0;
        try {
            ssr = stats::ols(X, y).ssr;
        } catch (const Error&) {
            continue;
        }
        const double sigma2 = std::max(ssr / static_cast<double>(n), std::numeric_limits<double>::min());
        const double score = static_cast<double>(n) * std::log(sigma2) + 2.0 * static_cast<double>(k + 1);
        if (!best || score < best->second) best = std::make_pair(k, score);
    }
    return best;
}

inline std::optional<ScoredCandidate> score_thresholds(std::span<const double> x, std::span<const double> z,
                                                       const std::vector<double>& thresholds,
                                                       const IdentificationOptions& opt) {
    const std::size_t l = thresholds.size() + 1;
    std::vector<std::vector<std::size_t>> times(l);
    for (std::size_t t = opt.max_k; t < x.size(); ++t) {
        const auto j = static_cast<std::size_t>(std::lower_bound(thresholds.begin(), thresholds.end(), z[t]) -
                                                thresholds.begin());
        times[j].push_back(t);
    }
    ScoredCandidate out;
    out.structure.l = l;
    out.structure.thresholds = thresholds;
    double total = 0.0;
    double n = 0.0;
    for (std::size_t j = 0; j < l; ++j) {
        const auto best = best_regime_order(x, times[j], opt);
        if (!best) return std::nullopt;
        out.structure.orders.push_back(best->first);
        total += best->second;
        n += static_cast<double>(times[j].size());
    }
    out.naic = total / n;
    return out;
}

inline void enumerate_threshold_sets(const std::vector<double>& grid, std::size_t count, std::size_t from,
                                     std::vector<double>& current, std::vector<std::vector<double>>& out) {
    if (current.size() == count) {
        out.push_back(current);
        return;
    }
    for (std::size_t i = from; i < grid.size(); ++i) {
        current.push_back(grid[i]);
        enumerate_threshold_sets(grid, count, i + 1, current, out);
        current.pop_back();
    }
}

}  // namespace detail

/// Selects the number of regimes, thresholds and orders minimizing the normalized AIC
///   NAIC = sum_j [n_j ln(sigma_j^2) + 2(k_j + 1)] / sum_j n_j
/// over l = 2..max_l, thresholds drawn from empirical quantiles of z and orders 0..max_k.
/// All candidates share the effective sample t >= max_k so their scores are comparable.
/// The l = 1 linear fit is scored as a baseline row but never selected.
inline IdentificationResult identify_structure(std::span<const double> x, std::span<const double> z,
                                               const IdentificationOptions& opt = {}) {
    if (x.size() != z.size()) throw Error(ErrorCode::InvalidArgument, "x and z must be aligned");
    if (x.size() <= opt.max_k) throw Error(ErrorCode::InsufficientData, "series shorter than max_k");

    std::vector<double> grid;
    if (!opt.threshold_quantiles.empty()) {
        const std::vector<double> zs(z.begin() + static_cast<std::ptrdiff_t>(opt.max_k), z.end());
        for (double q : opt.threshold_quantiles) {
            const double v = stats::quantile(zs, q);
            if (grid.empty() || v > grid.back()) grid.push_back(v);
        }
    }

    IdentificationResult result;
    if (auto base = detail::score_thresholds(x, z, {}, opt)) result.best_per_l.push_back(*base);
    else result.best_per_l.push_back(ScoredCandidate{});

    for (std::size_t l = 2; l <= opt.max_l; ++l) {
        std::vector<std::vector<double>> sets;
        std::vector<double> current;
        detail::enumerate_threshold_sets(grid, l - 1, 0, current, sets);
        ScoredCandidate best_l;
        best_l.structure.l = l;
        for (const auto& th : sets) {
            auto scored = detail::score_thresholds(x, z, th, opt);
            if (scored && scored->naic < best_l.naic) best_l = *scored;
        }
        result.best_per_l.push_back(best_l);
        if (std::isfinite(best_l.naic) && best_l.naic < result.best.naic) result.best = best_l;
    }
    if (!std::isfinite(result.best.naic))
        throw Error(ErrorCode::NoFeasibleCandidate, "no threshold/order combination meets the per-regime sample floor");
    return result;
}

}  // namespace tarlev::inference
