#pragma once

#include "tarlev/core/bivariate_normal.hpp"
#include "tarlev/core/types.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace tarlev::core {

namespace detail {

inline std::vector<double> interval_edges(const std::vector<double>& thresholds) {
    std::vector<double> edges;
    edges.reserve(thresholds.size() + 2);
    edges.push_back(-std::numeric_limits<double>::infinity());
    edges.insert(edges.end(), thresholds.begin(), thresholds.end());
    edges.push_back(std::numeric_limits<double>::infinity());
    return edges;
}

inline std::size_t regime_index(const std::vector<double>& thresholds, double z) {
    return static_cast<std::size_t>(std::lower_bound(thresholds.begin(), thresholds.end(), z) - thresholds.begin());
}

}  // namespace detail

/// Limiting regime probabilities p_j = F(r_j) - F(r_{j-1}) and, for each requested lag w,
/// the joint probabilities P(Z_t in B_j, Z_{t-w} in B_k).
///
/// Gaussian AR(1) input uses the stationary normal law (correlation phi^w between Z_t and
/// Z_{t-w}); an observed series uses plug-in frequencies over the lag-aligned pairs.
inline RegimeProbs regime_probabilities(const ZProcessSpec& z, const std::vector<double>& thresholds,
                                        const std::vector<std::size_t>& lags = {}) {
    z.validate();
    for (std::size_t i = 1; i < thresholds.size(); ++i)
        if (!(thresholds[i] > thresholds[i - 1]))
            throw Error(ErrorCode::InvalidArgument, "thresholds must be strictly increasing");

    const std::size_t l = thresholds.size() + 1;
    RegimeProbs out;
    out.lags = lags;
    out.marginal.assign(l, 0.0);
    out.joint.assign(lags.size(), std::vector<std::vector<double>>(l, std::vector<double>(l, 0.0)));

    if (const auto* g = std::get_if<GaussianAR1>(&z.variant)) {
        const double sd = std::sqrt(g->stationary_variance());
        auto edges = detail::interval_edges(thresholds);
        for (auto& e : edges) e /= sd;  // infinities survive the division
        for (std::size_t j = 0; j < l; ++j) out.marginal[j] = normal_cdf(edges[j + 1]) - normal_cdf(edges[j]);
        for (std::size_t w = 0; w < lags.size(); ++w) {
            if (lags[w] == 0) {
                for (std::size_t j = 0; j < l; ++j) out.joint[w][j][j] = out.marginal[j];
                continue;
            }
            const double rho = std::pow(g->phi, static_cast<double>(lags[w]));
            for (std::size_t j = 0; j < l; ++j)
                for (std::size_t k = 0; k < l; ++k)
                    out.joint[w][j][k] = bivariate_normal_rectangle(edges[j], edges[j + 1], edges[k], edges[k + 1], rho);
        }
    } else {
        const auto& series = std::get<ObservedZ>(z.variant).series;
        std::vector<std::size_t> idx(series.size());
        for (std::size_t t = 0; t < series.size(); ++t) {
            idx[t] = detail::regime_index(thresholds, series[t]);
            out.marginal[idx[t]] += 1.0;
        }
        for (auto& p : out.marginal) p /= static_cast<double>(series.size());
        for (std::size_t w = 0; w < lags.size(); ++w) {
            const std::size_t lag = lags[w];
            if (lag >= series.size())
                throw Error(ErrorCode::InvalidArgument, "lag exceeds the observed Z series length");
            const double pairs = static_cast<double>(series.size() - lag);
            for (std::size_t t = lag; t < series.size(); ++t) out.joint[w][idx[t]][idx[t - lag]] += 1.0 / pairs;
        }
    }

    for (double p : out.marginal)
        if (!(p > 0.0)) throw Error(ErrorCode::DegenerateRegime, "a regime has zero limiting probability");
    return out;
}

}  // namespace tarlev::core
