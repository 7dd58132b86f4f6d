#pragma once

#include "tarlev/core/stationarity.hpp"
#include "tarlev/core/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace tarlev::core {

struct TarPath {
    std::vector<double> x;
    std::vector<double> z;
    std::vector<std::size_t> regime;
};

/// Generator for replication `index` of a run seeded with `base`. Replications are
/// independent of scheduling order.
inline std::mt19937_64 replication_rng(std::uint64_t base, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

/// Simulates n + burn_in steps of the open-loop recursion and drops the first burn_in.
/// Lags before the first simulated point are zero.
template <class Rng>
TarPath simulate_tar(const TarSpec& spec, const ZProcessSpec& z, std::size_t n, std::size_t burn_in, Rng& rng) {
    spec.validate();
    z.validate();
    if (!check_stationarity(spec).all_stationary())
        throw Error(ErrorCode::NonStationaryRegime, "cannot simulate a non-stationary regime");
    if (n < spec.max_order() || n == 0)
        throw Error(ErrorCode::InvalidArgument, "path length must be at least the largest AR order");

    const std::size_t total = n + burn_in;
    std::vector<double> zs(total);
    if (const auto* g = std::get_if<GaussianAR1>(&z.variant)) {
        std::normal_distribution<double> normal(0.0, 1.0);
        const double tau_sd = std::sqrt(g->tau_var);
        double prev = normal(rng) * std::sqrt(g->stationary_variance());
        for (std::size_t t = 0; t < total; ++t) {
            if (t > 0) prev = g->phi * prev + tau_sd * normal(rng);
            zs[t] = prev;
        }
    } else {
        const auto& obs = std::get<ObservedZ>(z.variant).series;
        if (obs.size() < total)
            throw Error(ErrorCode::InvalidArgument, "observed Z series shorter than n + burn_in");
        std::copy(obs.begin(), obs.begin() + static_cast<std::ptrdiff_t>(total), zs.begin());
    }

    std::normal_distribution<double> eps(0.0, 1.0);
    std::vector<double> xs(total, 0.0);
    std::vector<std::size_t> reg(total);
    for (std::size_t t = 0; t < total; ++t) {
        const std::size_t j = spec.regime_of(zs[t]);
        const Regime& r = spec.regimes[j];
        double v = r.intercept;
        for (std::size_t i = 0; i < r.ar.size() && i < t; ++i) v += r.ar[i] * xs[t - 1 - i];
        xs[t] = v + r.noise_weight * eps(rng);
        reg[t] = j;
    }

    TarPath out;
    const auto skip = static_cast<std::ptrdiff_t>(burn_in);
    out.x.assign(xs.begin() + skip, xs.end());
    out.z.assign(zs.begin() + skip, zs.end());
    out.regime.assign(reg.begin() + skip, reg.end());
    return out;
}

inline TarPath simulate_tar(const TarSpec& spec, const ZProcessSpec& z, std::size_t n, std::size_t burn_in,
                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return simulate_tar(spec, z, n, burn_in, rng);
}

}  // namespace tarlev::core
