#pragma once

#include "tarlev/bekk/asymmetry.hpp"
#include "tarlev/bekk/fit.hpp"
#include "tarlev/bekk/model.hpp"
#include "tarlev/bekk/nis.hpp"
#include "tarlev/core/json.hpp"
#include "tarlev/core/moments.hpp"
#include "tarlev/core/simulate.hpp"
#include "tarlev/inference/diagnostics.hpp"
#include "tarlev/inference/gibbs.hpp"
#include "tarlev/inference/identify.hpp"
#include "tarlev/inference/likelihood.hpp"
#include "tarlev/inference/nonlinearity.hpp"
#include "tarlev/inference/report.hpp"
#include "tarlev/io/ingest.hpp"
#include "tarlev/io/manifest.hpp"
#include "tarlev/io/presets.hpp"
#include "tarlev/leverage/leverage.hpp"
#include "tarlev/stats/descriptive.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tarlev::io {

using nlohmann::json;

inline constexpr std::array<std::string_view, 7> kPipelines{"simulate", "moments", "fit-tar", "fit-bekk",
                                                            "nic",      "validate", "compare"};

struct ExperimentConfig {
    std::string pipeline;
    json model;                              // preset name, file path, or inline model object
    std::optional<std::string> target_path;  // `date,price` CSV of X
    std::optional<std::string> threshold_path;  // `date,price` CSV of the threshold series
    std::uint64_t seed = 42;
    std::string output_dir = "out";
    json options = json::object();

    template <class T>
    [[nodiscard]] T option(const std::string& key, T fallback) const {
        if (!options.contains(key)) return fallback;
        try {
            return options.at(key).get<T>();
        } catch (const json::exception& e) {
            throw Error(ErrorCode::Configuration, "option '" + key + "': " + e.what());
        }
    }

    /// Throws Configuration for unknown pipelines, missing models and unreadable inputs, so
    /// nothing is computed from a bad config.
    void validate() const {
        bool known = false;
        for (auto p : kPipelines) known = known || p == pipeline;
        if (!known) throw Error(ErrorCode::Configuration, "unknown pipeline '" + pipeline + "'");
        if (!options.is_object()) throw Error(ErrorCode::Configuration, "`options` must be an object");
        if (target_path.has_value() != threshold_path.has_value())
            throw Error(ErrorCode::Configuration, "target and threshold inputs must be given together");
        for (const auto* p : {&target_path, &threshold_path})
            if (*p && !std::filesystem::exists(**p))
                throw Error(ErrorCode::Configuration, "input '" + **p + "' does not exist");
        const bool needs_model = pipeline != "fit-tar" && pipeline != "fit-bekk";
        const bool data_free = !target_path.has_value();
        if ((needs_model || data_free) && model.is_null())
            throw Error(ErrorCode::Configuration, "pipeline '" + pipeline + "' needs a model");
    }

    static ExperimentConfig from_json(const json& j) {
        try {
            ExperimentConfig c;
            c.pipeline = j.value("pipeline", std::string{});
            if (j.contains("model")) c.model = j.at("model");
            if (j.contains("inputs")) {
                const auto& in = j.at("inputs");
                if (in.contains("target")) c.target_path = in.at("target").get<std::string>();
                if (in.contains("threshold")) c.threshold_path = in.at("threshold").get<std::string>();
            }
            c.seed = j.value("seed", std::uint64_t{42});
            c.output_dir = j.value("output_dir", std::string{"out"});
            if (j.contains("options")) c.options = j.at("options");
            return c;
        } catch (const json::exception& e) {
            throw Error(ErrorCode::Configuration, std::string("config: ") + e.what());
        }
    }
};

namespace detail {

inline json load_json_reference(const json& ref, std::string_view expected_kind) {
    try {
        if (ref.is_object()) return ref;
        if (!ref.is_string()) throw Error(ErrorCode::Configuration, "model must be a preset name, path or object");
        const auto name = ref.get<std::string>();
        for (const auto& p : kPresets)
            if (p.name == name) {
                if (p.kind != expected_kind)
                    throw Error(ErrorCode::Configuration, "preset '" + name + "' is not a " + std::string(expected_kind) + " model");
                return json::parse(p.json);
            }
        if (!std::filesystem::exists(name))
            throw Error(ErrorCode::Configuration, "'" + name + "' is neither a preset nor a file");
        return json::parse(read_file(name));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Configuration, std::string("model: ") + e.what());
    }
}

inline core::ModelDocument load_tar_model(const json& ref) {
    try {
        return core::model_from_json(load_json_reference(ref, "tar"));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidSpec) throw Error(ErrorCode::Configuration, e.what());
        throw;
    }
}

inline bekk::BekkParams load_bekk_model(const json& ref) {
    try {
        return bekk::params_from_json(load_json_reference(ref, "bekk"));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidSpec || e.code() == ErrorCode::InvalidArgument)
            throw Error(ErrorCode::Configuration, e.what());
        throw;
    }
}

struct TarData {
    std::vector<double> x;
    std::vector<double> z;
    std::size_t interpolated = 0;
    bool simulated = false;
};

// Observed data: x_t is the target return and z_t the threshold return lagged by `z_lag`.
// Otherwise a path is simulated from the model.
inline TarData tar_data(const ExperimentConfig& c, OutputWriter& out) {
    TarData d;
    if (c.target_path) {
        const auto series = ingest_prices({*c.target_path, *c.threshold_path});
        const auto lag = c.option<std::size_t>("z_lag", 1);
        const auto& x = series[0].returns;
        const auto& z = series[1].returns;
        if (x.size() <= lag + 1) throw Error(ErrorCode::InsufficientData, "too few aligned returns");
        d.x.assign(x.begin() + static_cast<std::ptrdiff_t>(lag), x.end());
        d.z.assign(z.begin(), z.end() - static_cast<std::ptrdiff_t>(lag));
        d.interpolated = series[0].interpolated_count() + series[1].interpolated_count();
        out.write("returns_target.csv", returns_csv(series[0]));
        out.write("returns_threshold.csv", returns_csv(series[1]));
        return d;
    }
    const auto doc = load_tar_model(c.model);
    const auto path = core::simulate_tar(doc.spec, doc.z, c.option<std::size_t>("n", 2000),
                                         c.option<std::size_t>("burn_in", 300), c.seed);
    d.x = path.x;
    d.z = path.z;
    d.simulated = true;
    std::ostringstream os;
    os << "t,x,z\n";
    for (std::size_t t = 0; t < d.x.size(); ++t) os << t << ',' << format_double(d.x[t]) << ',' << format_double(d.z[t]) << '\n';
    out.write("simulated_path.csv", os.str());
    return d;
}

struct BekkData {
    std::vector<bekk::Vec2> r;
    std::size_t interpolated = 0;
};

inline BekkData bekk_data(const ExperimentConfig& c, OutputWriter& out) {
    BekkData d;
    if (c.target_path) {
        const auto series = ingest_prices({*c.target_path, *c.threshold_path});
        for (std::size_t t = 0; t < series[0].returns.size(); ++t)
            d.r.emplace_back(series[0].returns[t], series[1].returns[t]);
        d.interpolated = series[0].interpolated_count() + series[1].interpolated_count();
        return d;
    }
    const auto params = load_bekk_model(c.model);
    auto rng = core::replication_rng(c.seed, 0);
    d.r = bekk::simulate_bekk(params, c.option<std::size_t>("n", 2000), c.option<std::size_t>("burn_in", 500), rng).returns;
    std::ostringstream os;
    os << "t,r1,r2\n";
    for (std::size_t t = 0; t < d.r.size(); ++t)
        os << t << ',' << format_double(d.r[t](0)) << ',' << format_double(d.r[t](1)) << '\n';
    out.write("simulated_returns.csv", os.str());
    return d;
}

inline std::vector<double> grid_from_options(const ExperimentConfig& c, const std::string& prefix, double lo, double hi,
                                             std::size_t points) {
    lo = c.option<double>(prefix + "from", lo);
    hi = c.option<double>(prefix + "to", hi);
    points = c.option<std::size_t>(prefix + "points", points);
    if (points < 2 || !(hi > lo)) throw Error(ErrorCode::Configuration, "grid needs from < to and at least two points");
    return leverage::linear_grid(lo, hi, points);
}

inline json moment_block(std::span<const double> v) {
    return {{"mean", stats::mean(v)},
            {"variance", stats::variance(v)},
            {"skewness", stats::skewness(v)},
            {"kurtosis", stats::kurtosis(v)}};
}

// ---- pipelines --------------------------------------------------------------------------

inline json run_simulate(const ExperimentConfig& c, OutputWriter& out) {
    const auto doc = load_tar_model(c.model);
    const auto reps = c.option<std::size_t>("reps", 1000);
    const auto len = c.option<std::size_t>("len", 300);
    const auto burn = c.option<std::size_t>("burn_in", 300);
    if (reps < 2) throw Error(ErrorCode::Configuration, "reps must be at least 2");
    const auto theory = core::unconditional_moments(doc.spec, doc.probs());

    std::vector<double> means, variances, skews, kurts;
    for (std::size_t i = 0; i < reps; ++i) {
        auto rng = core::replication_rng(c.seed, i);
        const auto path = core::simulate_tar(doc.spec, doc.z, len, burn, rng);
        means.push_back(stats::mean(path.x));
        variances.push_back(stats::central_moment(path.x, 2));
        skews.push_back(stats::skewness(path.x));
        kurts.push_back(stats::kurtosis(path.x));
    }
    auto row = [](const std::vector<double>& v, double theoretical) {
        const double m = stats::mean(v);
        const double sd = stats::stddev(v);
        return json{{"sample_mean", m},
                    {"sample_sd", sd},
                    {"interval", {m - 2.0 * sd, m + 2.0 * sd}},
                    {"theoretical", theoretical},
                    {"contains_theoretical", theoretical >= m - 2.0 * sd && theoretical <= m + 2.0 * sd}};
    };
    json report = {{"model", doc.name},
                   {"replications", reps},
                   {"length", len},
                   {"burn_in", burn},
                   {"seed", c.seed},
                   {"regime_probabilities", doc.probs().marginal},
                   {"mean", row(means, theory.mean)},
                   {"variance", row(variances, theory.variance)},
                   {"skewness", row(skews, theory.skewness)},
                   {"kurtosis", row(kurts, theory.kurtosis)}};
    out.write_json("simulation.json", report);
    std::ostringstream os;
    os << "replication,mean,variance,skewness,kurtosis\n";
    for (std::size_t i = 0; i < reps; ++i)
        os << i << ',' << format_double(means[i]) << ',' << format_double(variances[i]) << ','
           << format_double(skews[i]) << ',' << format_double(kurts[i]) << '\n';
    out.write("simulation_replications.csv", os.str());
    return {};
}

inline json run_moments(const ExperimentConfig& c, OutputWriter& out) {
    const auto doc = load_tar_model(c.model);
    const auto probs = doc.probs();
    const auto history = c.option<std::vector<double>>("history", std::vector<double>(doc.spec.max_order(), 0.0));
    const auto summary = core::unconditional_moments(doc.spec, probs);
    const auto cond = core::conditional_moments(doc.spec, probs, history);
    json j = core::moments_to_json(doc.spec, probs, summary, cond);
    j["model"] = doc.name;
    j["history"] = history;
    j["conditional_variance_to_the_past_at_history"] = cond.type3->variance;
    j["conditional_mean_to_the_past_at_history"] = cond.type3->mean;
    json stat = json::array();
    for (const auto& r : core::check_stationarity(doc.spec).regimes)
        stat.push_back({{"max_inverse_root", r.max_inverse_root}, {"stationary", r.stationary}});
    j["stationarity"] = stat;
    json psi = json::array();
    for (const auto& r : doc.spec.regimes) {
        const auto w = core::compute_psi_weights(r);
        psi.push_back({{"psi_at_one", w.psi_sum}, {"sigma_bar_sq", w.sigma_bar_sq}, {"terms", w.psi.size()}});
    }
    j["psi"] = psi;
    out.write_json("moments.json", j);
    return {};
}

inline json run_nic(const ExperimentConfig& c, OutputWriter& out) {
    const auto doc = load_tar_model(c.model);
    const auto grid = grid_from_options(c, "grid_", -0.10, 0.10, 401);
    const auto curve = leverage::nic_curve(doc.spec, doc.probs(), grid);
    out.write("nic.csv", leverage::nic_csv(curve));
    json lev = leverage::leverage_json(curve);
    lev["model"] = doc.name;
    std::size_t argmin = 0;
    for (std::size_t i = 1; i < curve.volatility.size(); ++i)
        if (curve.volatility[i] < curve.volatility[argmin]) argmin = i;
    lev["grid_argmin"] = curve.grid[argmin];
    lev["grid_min_volatility"] = curve.volatility[argmin];
    out.write_json("leverage.json", lev);
    return {};
}

inline void write_validation(const core::TarSpec& spec, const std::vector<double>& x, const std::vector<double>& z,
                             OutputWriter& out, std::size_t max_lag) {
    const auto regimes = inference::regimes_from_z(spec, z);
    auto residuals = inference::pseudo_residuals(spec, x, regimes);
    const auto report = inference::validate_residuals(std::move(residuals), max_lag);
    json j = inference::validation_json(report);
    j["log_likelihood"] = inference::conditional_log_likelihood(spec, x, regimes);
    out.write_json("validation.json", j);
    out.write("acf.csv", inference::correlogram_csv(report.correlogram));
    out.write("acf_squared.csv", inference::correlogram_csv(report.squared_correlogram));
    out.write("cusum.csv", inference::cusum_csv(report.cusum));
    std::ostringstream os;
    os << "t,residual\n";
    for (std::size_t t = 0; t < report.residuals.size(); ++t) os << t << ',' << format_double(report.residuals[t]) << '\n';
    out.write("pseudo_residuals.csv", os.str());
}

inline json run_validate(const ExperimentConfig& c, OutputWriter& out, std::size_t& interpolated) {
    const auto doc = load_tar_model(c.model);
    const auto data = tar_data(c, out);
    interpolated = data.interpolated;
    write_validation(doc.spec, data.x, data.z, out, c.option<std::size_t>("max_lag", 20));
    return {};
}

inline json run_fit_tar(const ExperimentConfig& c, OutputWriter& out, std::size_t& interpolated) {
    const auto data = tar_data(c, out);
    interpolated = data.interpolated;

    inference::IdentificationOptions id;
    id.max_l = c.option<std::size_t>("max_l", 2);
    id.max_k = c.option<std::size_t>("max_k", 6);
    id.threshold_quantiles = c.option<std::vector<double>>("threshold_quantiles", id.threshold_quantiles);

    const auto delays = c.option<std::vector<std::size_t>>("delays", {0});
    const auto nl = inference::nonlinearity_test(data.x, data.z, c.option<std::size_t>("nonlinearity_order", id.max_k), delays);
    out.write_json("nonlinearity.json", inference::nonlinearity_json(nl));

    const auto ident = inference::identify_structure(data.x, data.z, id);
    out.write_json("identification.json", inference::identification_json(ident));

    inference::GibbsOptions g;
    g.iterations = c.option<std::size_t>("iterations", 6000);
    g.burn_in = c.option<std::size_t>("gibbs_burn_in", 1000);
    g.seed = c.seed;
    const auto post = inference::fit_gibbs(data.x, data.z, ident.best.structure, std::nullopt, g);
    out.write("posterior_draws.csv", inference::posterior_draws_csv(post));
    out.write_json("posterior.json", inference::posterior_summary_json(post));

    core::ModelDocument fitted;
    fitted.name = "fitted";
    fitted.spec = post.posterior_mean_spec();
    fitted.z = core::ZProcessSpec{core::ObservedZ{data.z}};
    const auto probs = core::regime_probabilities(fitted.z, fitted.spec.thresholds);
    fitted.probabilities = probs.marginal;
    json model = core::model_to_json(fitted);
    model.erase("z");
    out.write_json("fitted_model.json", model);

    write_validation(fitted.spec, data.x, data.z, out, c.option<std::size_t>("max_lag", 20));

    const auto vol = leverage::type3_volatility_path(fitted.spec, probs, data.x);
    const std::size_t k = fitted.spec.max_order();
    // vol[i] is the volatility at time k + i; pair it with the return at the same time so the
    // regression sees r_{t-1} next to ln(sigma_t / sigma_{t-1}).
    const std::vector<double> aligned(data.x.begin() + static_cast<std::ptrdiff_t>(k), data.x.end());
    const auto el = leverage::leverage_elasticity(vol, aligned);
    out.write_json("elasticity.json", leverage::elasticity_json(el));
    if (!fitted.spec.thresholds.empty()) {
        const auto curve = leverage::nic_curve(fitted.spec, probs, grid_from_options(c, "grid_", -0.10, 0.10, 401));
        out.write("nic.csv", leverage::nic_csv(curve));
        out.write_json("leverage.json", leverage::leverage_json(curve));
    }
    return {};
}

inline json run_fit_bekk(const ExperimentConfig& c, OutputWriter& out, std::size_t& interpolated) {
    const auto data = bekk_data(c, out);
    interpolated = data.interpolated;
    const auto p = c.option<std::size_t>("p", 1);
    bekk::BekkFitOptions fo;
    fo.optimizer.max_iterations = c.option<int>("max_iterations", 500);
    const auto fit = bekk::fit_bekk(data.r, p, std::nullopt, fo);
    json report = bekk::fit_to_json(fit);
    const auto filtered = bekk::bekk_filter(fit.params, data.r, fit.h0);

    bekk::Mat2 h_bar = bekk::Mat2::Zero();
    bekk::Vec2 a_bar = bekk::Vec2::Zero();
    for (std::size_t t = 0; t < filtered.covariances.size(); ++t) {
        h_bar += filtered.covariances[t];
        a_bar += filtered.residuals[t];
    }
    h_bar /= static_cast<double>(filtered.covariances.size());
    a_bar /= static_cast<double>(filtered.residuals.size());
    report["h_bar"] = bekk::matrix_json(h_bar);
    report["sigma11_expansion"] = bekk::sigma11_expansion_json(bekk::sigma11_expansion(fit.params));

    json asym = json::object();
    for (int i = 0; i < 2; ++i) {
        std::vector<double> eta;
        for (const auto& e : filtered.standardized) eta.push_back(e(i));
        asym["series" + std::to_string(i + 1)] = bekk::asymmetry_json(bekk::asymmetry_tests(eta));
    }
    report["asymmetry_tests"] = asym;
    out.write_json("bekk_fit.json", report);

    const auto grid = grid_from_options(c, "grid_", -0.10, 0.10, 41);
    out.write("nis.csv", bekk::nis_csv(bekk::nis_surface(fit.params, h_bar, grid, grid)));
    out.write("nis_slice.csv", bekk::nis_csv(bekk::nis_slice(fit.params, h_bar, a_bar(1), grid)));
    return {};
}

inline json run_compare(const ExperimentConfig& c, OutputWriter& out, std::size_t& interpolated) {
    const auto doc = load_tar_model(c.model);
    if (!c.options.contains("bekk")) throw Error(ErrorCode::Configuration, "compare needs options.bekk");
    const auto params = load_bekk_model(c.options.at("bekk"));
    const auto probs = doc.probs();
    const auto tar = core::unconditional_moments(doc.spec, probs);

    // Moments of the BEKK side are sample moments of the target returns (observed, or a path
    // simulated from the BEKK parameters).
    std::vector<double> x;
    if (c.target_path) {
        const auto series = ingest_prices({*c.target_path, *c.threshold_path});
        x = series[0].returns;
        interpolated = series[0].interpolated_count() + series[1].interpolated_count();
    } else {
        auto rng = core::replication_rng(c.seed, 0);
        for (const auto& r : bekk::simulate_bekk(params, c.option<std::size_t>("n", 5000), 500, rng).returns)
            x.push_back(r(0));
    }
    double weighted_intercept = 0.0;
    std::vector<double> lag_coef(doc.spec.max_order(), 0.0);
    for (std::size_t j = 0; j < doc.spec.regime_count(); ++j) {
        weighted_intercept += probs.marginal[j] * doc.spec.regimes[j].intercept;
        for (std::size_t i = 0; i < doc.spec.regimes[j].ar.size(); ++i)
            lag_coef[i] += probs.marginal[j] * doc.spec.regimes[j].ar[i];
    }
    json regime_means = json::array();
    double noise = 0.0;
    for (std::size_t j = 0; j < doc.spec.regime_count(); ++j) {
        const auto& r = doc.spec.regimes[j];
        regime_means.push_back({{"intercept", r.intercept}, {"lag_coefficients", r.ar}});
        noise += probs.marginal[j] * r.noise_weight * r.noise_weight;
    }
    json bekk_mean = {{"intercept", params.mu(0)}, {"lag_coefficients", json::array()}};
    for (const auto& g : params.gamma) bekk_mean["lag_coefficients"].push_back({{"x", g(0, 0)}, {"z", g(0, 1)}});

    json j = {
        {"tar",
         {{"mean", tar.mean},
          {"variance", tar.variance},
          {"skewness", tar.skewness},
          {"kurtosis", tar.kurtosis},
          {"conditional_mean_to_the_past", {{"intercept", weighted_intercept}, {"lag_coefficients", lag_coef}}},
          {"conditional_variance_to_the_past",
           {{"noise_term", noise}, {"regime_means", regime_means}, {"weights", probs.marginal}}}}},
        {"mgarch",
         {{"moments_source", c.target_path ? "observed target returns" : "simulated target returns"},
          {"sample", moment_block(x)},
          {"conditional_mean_to_the_past", bekk_mean},
          {"conditional_variance_to_the_past", bekk::sigma11_expansion_json(bekk::sigma11_expansion(params))}}},
    };
    out.write_json("comparison.json", j);
    return {};
}

}  // namespace detail

/// Runs one pipeline, writing its outputs and finally `manifest.json` into the output
/// directory. Returns the manifest.
inline json run_experiment(const ExperimentConfig& c) {
    c.validate();
    OutputWriter out(c.output_dir);
    std::size_t interpolated = 0;
    try {
        if (c.pipeline == "simulate") detail::run_simulate(c, out);
        else if (c.pipeline == "moments") detail::run_moments(c, out);
        else if (c.pipeline == "nic") detail::run_nic(c, out);
        else if (c.pipeline == "validate") detail::run_validate(c, out, interpolated);
        else if (c.pipeline == "fit-tar") detail::run_fit_tar(c, out, interpolated);
        else if (c.pipeline == "fit-bekk") detail::run_fit_bekk(c, out, interpolated);
        else if (c.pipeline == "compare") detail::run_compare(c, out, interpolated);
    } catch (const Error& e) {
        throw Error(e.code(), "pipeline '" + c.pipeline + "': " + e.what());
    }
    return out.finish({{"pipeline", c.pipeline}, {"seed", c.seed}, {"interpolated_points", interpolated}});
}

}  // namespace tarlev::io
