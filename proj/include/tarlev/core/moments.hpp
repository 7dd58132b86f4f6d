#pragma once

#include "tarlev/core/regime_probs.hpp"
#include "tarlev/core/stationarity.hpp"
#include "tarlev/core/types.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace tarlev::core {

/// Mean and variance of the regime mixture evaluated from per-regime moments.
struct MeanVariance {
    double mean = 0.0;
    double variance = 0.0;
};

/// Unconditional mean, variance, skewness and kurtosis of X_t.
///
/// Each regime contributes a normal component N(mu_j, sigma_j^2) with
/// mu_j = a_0 / phi_j(1) and sigma_j^2 = (h sigma_bar_j)^2, weighted by p_j. The variance is
/// sum p_j mu_{j,2} - mu^2; the standardized third and fourth moments use the central
/// mixture moments
///   E(X-mu)^3 = sum p_j d_j (3 sigma_j^2 + d_j^2)
///   E(X-mu)^4 = sum p_j (d_j^4 + 6 sigma_j^2 d_j^2 + 3 sigma_j^4),   d_j = mu_j - mu,
/// over E(X-mu)^2 = sum p_j (sigma_j^2 + d_j^2).
inline MomentSummary unconditional_moments(const TarSpec& spec, const RegimeProbs& probs,
                                           double psi_tol = kDefaultPsiTolerance) {
    spec.validate();
    probs.validate(spec.regime_count());

    MomentSummary out;
    double mean = 0.0;
    for (std::size_t j = 0; j < spec.regime_count(); ++j) {
        const auto& r = spec.regimes[j];
        const auto psi = compute_psi_weights(r, psi_tol);
        RegimeMoments m;
        m.mean = r.intercept / r.phi_at_one();
        m.variance = r.noise_weight * r.noise_weight * psi.sigma_bar_sq;
        m.second_moment = m.variance + m.mean * m.mean;
        out.per_regime.push_back(m);
        mean += probs.marginal[j] * m.mean;
    }
    out.mean = mean;

    double second = 0.0;
    double central2 = 0.0;
    double central3 = 0.0;
    double central4 = 0.0;
    for (std::size_t j = 0; j < spec.regime_count(); ++j) {
        const double p = probs.marginal[j];
        const auto& m = out.per_regime[j];
        const double d = m.mean - mean;
        const double s2 = m.variance;
        second += p * m.second_moment;
        central2 += p * (s2 + d * d);
        central3 += p * d * (3.0 * s2 + d * d);
        central4 += p * (d * d * d * d + 6.0 * s2 * d * d + 3.0 * s2 * s2);
    }
    out.variance = second - mean * mean;
    if (!(out.variance > 0.0) || !(central2 > 0.0))
        throw Error(ErrorCode::DegenerateVariance, "unconditional variance is not positive");
    out.skewness = central3 / std::pow(central2, 1.5);
    out.kurtosis = central4 / (central2 * central2);
    return out;
}

/// Type III moments: mixture over regimes of N(a_0 + sum a_i x_{t-i}, h^2) with weights p_j.
/// `history[0]` is x_{t-1}.
inline MeanVariance type3_moments(const TarSpec& spec, const std::vector<double>& marginal,
                                  const std::vector<double>& history) {
    if (history.size() < spec.max_order())
        throw Error(ErrorCode::InsufficientHistory, "history shorter than the largest AR order");
    double noise = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t j = 0; j < spec.regime_count(); ++j) {
        const auto& r = spec.regimes[j];
        const double p = marginal[j];
        const double mj = r.conditional_mean(history);
        noise += p * r.noise_weight * r.noise_weight;
        m1 += p * mj;
        m2 += p * mj * mj;
    }
    return {m1, noise + m2 - m1 * m1};
}

struct ConditionalMoments {
    std::vector<MeanVariance> type1;                 // given the regime
    std::optional<std::vector<MeanVariance>> type2;  // given the regime and the past
    std::optional<MeanVariance> type3;               // given the past only
};

/// Conditional means and variances of the three conditioning types. Type II and III are
/// filled only when `history` is supplied.
inline ConditionalMoments conditional_moments(const TarSpec& spec, const RegimeProbs& probs,
                                              const std::optional<std::vector<double>>& history = std::nullopt,
                                              double psi_tol = kDefaultPsiTolerance) {
    spec.validate();
    probs.validate(spec.regime_count());
    ConditionalMoments out;
    for (const auto& r : spec.regimes) {
        const auto psi = compute_psi_weights(r, psi_tol);
        const double sd = r.noise_weight * std::sqrt(psi.sigma_bar_sq);
        out.type1.push_back({psi.psi_sum * r.intercept, sd * sd});
    }
    if (history) {
        if (history->size() < spec.max_order())
            throw Error(ErrorCode::InsufficientHistory, "history shorter than the largest AR order");
        std::vector<MeanVariance> t2;
        for (const auto& r : spec.regimes)
            t2.push_back({r.conditional_mean(*history), r.noise_weight * r.noise_weight});
        out.type2 = std::move(t2);
        out.type3 = type3_moments(spec, probs.marginal, *history);
    }
    return out;
}

/// gamma(w) for w = 0..omega_max:
///   sum_{j,k} P(Z_t in B_j, Z_{t-w} in B_k) q_jk(w) - mu^2,
///   q_jk(w) = mu_j mu_k + h_j h_k sum_m psi^(k)_m psi^(j)_{m+w}.
inline std::vector<double> autocovariance(const TarSpec& spec, const ZProcessSpec& z, std::size_t omega_max,
                                          double psi_tol = kDefaultPsiTolerance) {
    spec.validate();
    std::vector<std::size_t> lags(omega_max + 1);
    for (std::size_t w = 0; w <= omega_max; ++w) lags[w] = w;
    const auto probs = regime_probabilities(z, spec.thresholds, lags);

    const std::size_t l = spec.regime_count();
    std::vector<PsiWeights> psi;
    std::vector<double> mu(l);
    double mean = 0.0;
    for (std::size_t j = 0; j < l; ++j) {
        psi.push_back(compute_psi_weights(spec.regimes[j], psi_tol));
        mu[j] = spec.regimes[j].intercept / spec.regimes[j].phi_at_one();
        mean += probs.marginal[j] * mu[j];
    }

    std::vector<double> gamma(omega_max + 1, 0.0);
    for (std::size_t w = 0; w <= omega_max; ++w) {
        double acc = 0.0;
        for (std::size_t j = 0; j < l; ++j) {
            for (std::size_t k = 0; k < l; ++k) {
                const auto& pj = psi[j].psi;
                const auto& pk = psi[k].psi;
                double cross = 0.0;
                for (std::size_t m = 0; m < pk.size() && m + w < pj.size(); ++m) cross += pk[m] * pj[m + w];
                const double q = mu[j] * mu[k] +
                                 spec.regimes[j].noise_weight * spec.regimes[k].noise_weight * cross;
                acc += probs.joint[w][j][k] * q;
            }
        }
        gamma[w] = acc - mean * mean;
    }
    return gamma;
}

}  // namespace tarlev::core
