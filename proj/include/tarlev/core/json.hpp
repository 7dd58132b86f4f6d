#pragma once

#include "tarlev/core/moments.hpp"
#include "tarlev/core/regime_probs.hpp"
#include "tarlev/core/types.hpp"

#include <json.hpp>

#include <cmath>
#include <optional>
#include <string>

namespace tarlev::core {

using nlohmann::json;

/// A TAR model as stored on disk: the spec, its threshold process, and optionally fixed
/// regime probabilities that take precedence over those implied by `z`.
struct ModelDocument {
    std::string name;
    std::string description;
    TarSpec spec;
    ZProcessSpec z{GaussianAR1{}};
    std::optional<std::vector<double>> probabilities;

    [[nodiscard]] RegimeProbs probs(const std::vector<std::size_t>& lags = {}) const {
        if (probabilities && lags.empty()) return RegimeProbs::from_marginal(*probabilities);
        return regime_probabilities(z, spec.thresholds, lags);
    }
};

inline json tar_spec_to_json(const TarSpec& spec) {
    json regimes = json::array();
    for (const auto& r : spec.regimes)
        regimes.push_back({{"order", r.order()}, {"intercept", r.intercept}, {"ar", r.ar}, {"h", r.noise_weight}});
    return {{"l", spec.regime_count()}, {"thresholds", spec.thresholds}, {"regimes", regimes}};
}

inline TarSpec tar_spec_from_json(const json& j) {
    try {
        TarSpec spec;
        spec.thresholds = j.value("thresholds", std::vector<double>{});
        for (const auto& rj : j.at("regimes")) {
            Regime r;
            r.intercept = rj.at("intercept").get<double>();
            r.ar = rj.value("ar", std::vector<double>{});
            if (rj.contains("h") == rj.contains("h2"))
                throw Error(ErrorCode::InvalidSpec, "each regime needs exactly one of `h` or `h2`");
            r.noise_weight = rj.contains("h") ? rj.at("h").get<double>() : std::sqrt(rj.at("h2").get<double>());
            if (rj.contains("h2") && !(rj.at("h2").get<double>() >= 0.0))
                throw Error(ErrorCode::InvalidSpec, "`h2` must be nonnegative");
            if (rj.contains("order") && rj.at("order").get<std::size_t>() != r.ar.size())
                throw Error(ErrorCode::InvalidSpec, "regime order does not match its AR coefficient count");
            spec.regimes.push_back(std::move(r));
        }
        if (j.contains("l") && j.at("l").get<std::size_t>() != spec.regimes.size())
            throw Error(ErrorCode::InvalidSpec, "`l` does not match the number of regimes");
        spec.validate();
        return spec;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidSpec, e.what());
    }
}

inline json z_spec_to_json(const ZProcessSpec& z) {
    if (const auto* g = std::get_if<GaussianAR1>(&z.variant))
        return {{"kind", "gaussian_ar1"}, {"phi", g->phi}, {"tau_var", g->tau_var}};
    return {{"kind", "observed"}, {"series", std::get<ObservedZ>(z.variant).series}};
}

inline ZProcessSpec z_spec_from_json(const json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        ZProcessSpec z{GaussianAR1{}};
        if (kind == "gaussian_ar1") {
            z.variant = GaussianAR1{j.at("phi").get<double>(), j.at("tau_var").get<double>()};
        } else if (kind == "observed") {
            z.variant = ObservedZ{j.at("series").get<std::vector<double>>()};
        } else {
            throw Error(ErrorCode::InvalidSpec, "unknown z kind '" + kind + "'");
        }
        z.validate();
        return z;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidSpec, e.what());
    }
}

inline json model_to_json(const ModelDocument& doc) {
    json j = tar_spec_to_json(doc.spec);
    if (!doc.name.empty()) j["name"] = doc.name;
    if (!doc.description.empty()) j["description"] = doc.description;
    j["z"] = z_spec_to_json(doc.z);
    if (doc.probabilities) j["regime_probabilities"] = *doc.probabilities;
    return j;
}

inline ModelDocument model_from_json(const json& j) {
    ModelDocument doc;
    doc.spec = tar_spec_from_json(j);
    doc.name = j.value("name", std::string{});
    doc.description = j.value("description", std::string{});
    if (j.contains("z")) doc.z = z_spec_from_json(j.at("z"));
    if (j.contains("regime_probabilities")) {
        doc.probabilities = j.at("regime_probabilities").get<std::vector<double>>();
        RegimeProbs::from_marginal(*doc.probabilities).validate(doc.spec.regime_count());
    }
    return doc;
}

/// Moments in the row layout of the usual TAR moment table.
inline json moments_to_json(const TarSpec& spec, const RegimeProbs& probs, const MomentSummary& m,
                            const ConditionalMoments& c) {
    json type1_mean = json::array();
    json type1_var = json::array();
    for (const auto& t : c.type1) {
        type1_mean.push_back(t.mean);
        type1_var.push_back(t.variance);
    }
    json type2_mean = json::array();
    json type2_var = json::array();
    json type3_mean = {{"intercept", 0.0}, {"lag_coefficients", json::array()}};
    double weighted_intercept = 0.0;
    std::vector<double> lag_coef(spec.max_order(), 0.0);
    for (std::size_t j = 0; j < spec.regime_count(); ++j) {
        const auto& r = spec.regimes[j];
        type2_mean.push_back({{"intercept", r.intercept}, {"lag_coefficients", r.ar}});
        type2_var.push_back(r.noise_weight * r.noise_weight);
        weighted_intercept += probs.marginal[j] * r.intercept;
        for (std::size_t i = 0; i < r.ar.size(); ++i) lag_coef[i] += probs.marginal[j] * r.ar[i];
    }
    type3_mean["intercept"] = weighted_intercept;
    type3_mean["lag_coefficients"] = lag_coef;

    json per_regime = json::array();
    for (const auto& r : m.per_regime)
        per_regime.push_back({{"mu_j1", r.mean}, {"mu_j2", r.second_moment}, {"sigma_j_sq", r.variance}});

    double noise = 0.0;
    for (std::size_t j = 0; j < spec.regime_count(); ++j)
        noise += probs.marginal[j] * spec.regimes[j].noise_weight * spec.regimes[j].noise_weight;

    return {
        {"regime_probabilities", probs.marginal},
        {"non_conditional_mean", m.mean},
        {"non_conditional_variance", m.variance},
        {"non_conditional_asymmetry", m.skewness},
        {"non_conditional_kurtosis", m.kurtosis},
        {"conditional_mean_to_the_regimens", type1_mean},
        {"conditional_variance_to_the_regimens", type1_var},
        {"conditional_mean_to_the_regimens_and_past", type2_mean},
        {"conditional_variance_to_the_regimens_and_past", type2_var},
        {"conditional_mean_to_the_past", type3_mean},
        {"conditional_variance_to_the_past", {{"noise_term", noise},
                                              {"regime_means", type2_mean},
                                              {"weights", probs.marginal}}},
        {"per_regime", per_regime},
    };
}

}  // namespace tarlev::core
