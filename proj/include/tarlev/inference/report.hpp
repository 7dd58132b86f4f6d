#pragma once

#include "tarlev/format.hpp"
#include "tarlev/inference/diagnostics.hpp"
#include "tarlev/inference/gibbs.hpp"
#include "tarlev/inference/identify.hpp"
#include "tarlev/inference/nonlinearity.hpp"

#include <json.hpp>

#include <sstream>
#include <string>

namespace tarlev::inference {

using nlohmann::json;

/// One row per draw (burn-in included, flagged), one column per parameter.
inline std::string posterior_draws_csv(const PosteriorDraws& d) {
    std::ostringstream os;
    os << "iteration,burn_in";
    for (const auto& n : d.names) os << ',' << n;
    os << '\n';
    for (Eigen::Index i = 0; i < d.draws.rows(); ++i) {
        os << i << ',' << (static_cast<std::size_t>(i) < d.burn_in ? 1 : 0);
        for (Eigen::Index c = 0; c < d.draws.cols(); ++c) os << ',' << format_double(d.draws(i, c));
        os << '\n';
    }
    return os.str();
}

/// Per-regime estimate, typical deviation and 90% credible interval of every parameter.
inline json posterior_summary_json(const PosteriorDraws& d) {
    json regimes = json::array();
    for (std::size_t j = 0; j < d.structure.l; ++j) {
        json params = json::array();
        for (std::size_t i = 0; i <= d.structure.orders[j] + 1; ++i) {
            const auto& s = d.summary[static_cast<std::size_t>(d.coef_index(j, i))];
            params.push_back({{"name", s.name},
                              {"estimate", s.mean},
                              {"typical_deviation", s.sd},
                              {"credible_interval_90", {s.lower90, s.upper90}},
                              {"credible_interval_95", {s.lower95, s.upper95}}});
        }
        regimes.push_back({{"regime", j + 1},
                           {"order", d.structure.orders[j]},
                           {"parameters", params},
                           {"split_rhat_h2", d.split_rhat_variance[j]}});
    }
    return {{"l", d.structure.l},
            {"thresholds", d.structure.thresholds},
            {"iterations", d.iterations},
            {"burn_in", d.burn_in},
            {"regimes", regimes}};
}

inline json identification_json(const IdentificationResult& r) {
    auto cand = [](const ScoredCandidate& c) {
        return json{{"l", c.structure.l},
                    {"thresholds", c.structure.thresholds},
                    {"orders", c.structure.orders},
                    {"naic", std::isfinite(c.naic) ? json(c.naic) : json(nullptr)}};
    };
    json rows = json::array();
    for (const auto& c : r.best_per_l) rows.push_back(cand(c));
    return {{"selected", cand(r.best)}, {"per_l", rows}};
}

inline json nonlinearity_json(const NonlinearityResult& r) {
    json rows = json::array();
    for (const auto& d : r.per_delay)
        rows.push_back({{"delay", d.delay}, {"f", d.f_statistic}, {"df1", d.df1}, {"df2", d.df2}, {"p_value", d.p_value}});
    return {{"f_statistic", r.f_statistic},
            {"p_value", r.p_value},
            {"p_value_bonferroni", r.p_value_bonferroni},
            {"best_delay", r.best_delay},
            {"per_delay", rows}};
}

/// lag,acf,pacf,band_lower,band_upper
inline std::string correlogram_csv(const Correlogram& c) {
    std::ostringstream os;
    os << "lag,acf,pacf,band_lower,band_upper\n";
    for (std::size_t w = 0; w < c.acf.size(); ++w)
        os << w << ',' << format_double(c.acf[w]) << ',' << format_double(c.pacf[w]) << ','
           << format_double(-c.band) << ',' << format_double(c.band) << '\n';
    return os.str();
}

/// t,cusum,cusum_lower,cusum_upper,cusumsq,cusumsq_lower,cusumsq_upper
inline std::string cusum_csv(const CusumResult& r) {
    std::ostringstream os;
    os << "t,cusum,cusum_lower,cusum_upper,cusumsq,cusumsq_lower,cusumsq_upper\n";
    for (std::size_t i = 0; i < r.cusum.statistic.size(); ++i)
        os << i + 1 << ',' << format_double(r.cusum.statistic[i]) << ',' << format_double(r.cusum.lower[i]) << ','
           << format_double(r.cusum.upper[i]) << ',' << format_double(r.cusumsq.statistic[i]) << ','
           << format_double(r.cusumsq.lower[i]) << ',' << format_double(r.cusumsq.upper[i]) << '\n';
    return os.str();
}

inline json validation_json(const ValidationReport& v) {
    auto test = [](const PortmanteauResult& p) {
        return json{{"statistic", p.statistic}, {"df", p.df}, {"p_value", p.p_value}};
    };
    return {{"residual_count", v.residuals.size()},
            {"residual_mean", stats::mean(v.residuals)},
            {"residual_variance", stats::variance(v.residuals)},
            {"acf_band", v.correlogram.band},
            {"acf_lags_outside_band", v.acf_lags_outside_band()},
            {"cusum_inside", v.cusum.cusum.inside},
            {"cusumsq_inside", v.cusum.cusumsq.inside},
            {"ljung_box", test(v.ljung_box)},
            {"arch_lm", test(v.arch_lm)},
            {"jarque_bera", test(v.jarque_bera)}};
}

}  // namespace tarlev::inference
