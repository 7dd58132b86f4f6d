#pragma once

#include "tarlev/tarlev.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

namespace tarlev::testing {

inline core::ModelDocument preset(const std::string& name) {
    return core::model_from_json(nlohmann::json::parse(io::find_preset(name).json));
}

inline bekk::BekkParams bekk_preset(const std::string& name) {
    return bekk::params_from_json(nlohmann::json::parse(io::find_preset(name).json));
}

// Spec with random stationary AR(1..3) regimes; thresholds at standard-normal quantiles.
inline core::TarSpec random_spec(std::mt19937_64& rng, std::size_t l) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> order(0, 3);
    core::TarSpec s;
    for (std::size_t j = 1; j < l; ++j) s.thresholds.push_back(-1.0 + 2.0 * static_cast<double>(j) / static_cast<double>(l));
    for (std::size_t j = 0; j < l; ++j) {
        core::Regime r;
        r.intercept = u(rng);
        const int k = order(rng);
        for (int i = 0; i < k; ++i) r.ar.push_back(0.3 * u(rng));  // sum |a| < 1 keeps it stationary
        r.noise_weight = 0.2 + std::abs(u(rng));
        s.regimes.push_back(r);
    }
    return s;
}

inline std::vector<double> random_probs(std::mt19937_64& rng, std::size_t l) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> p(l);
    double total = 0.0;
    for (auto& v : p) total += (v = u(rng));
    for (auto& v : p) v /= total;
    return p;
}

}  // namespace tarlev::testing
