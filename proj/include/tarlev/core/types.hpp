#pragma once

#include "tarlev/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <variant>
#include <vector>

namespace tarlev::core {

/// One regime of a TAR model: X_t = intercept + sum_i ar[i] X_{t-1-i} + noise_weight * eps_t.
struct Regime {
    double intercept = 0.0;
    std::vector<double> ar;     // a_1..a_k
    double noise_weight = 1.0;  // h, the standard deviation multiplier of eps_t

    [[nodiscard]] std::size_t order() const noexcept { return ar.size(); }
    [[nodiscard]] double ar_sum() const noexcept { return std::accumulate(ar.begin(), ar.end(), 0.0); }
    /// phi(1) = 1 - sum a_i
    [[nodiscard]] double phi_at_one() const noexcept { return 1.0 - ar_sum(); }

    /// a_0 + sum_i a_i x_{t-i}; `history[0]` is x_{t-1}.
    [[nodiscard]] double conditional_mean(const std::vector<double>& history) const {
        double m = intercept;
        for (std::size_t i = 0; i < ar.size(); ++i) m += ar[i] * history[i];
        return m;
    }
};

/// Full parameterization of a TAR(l; k_1, ..., k_l) model driven by an exogenous Z.
///
/// Regime j (0-based) is active when Z_t lies in (thresholds[j-1], thresholds[j]], with
/// the outer bounds at -inf and +inf.
struct TarSpec {
    std::vector<double> thresholds;
    std::vector<Regime> regimes;

    [[nodiscard]] std::size_t regime_count() const noexcept { return regimes.size(); }

    [[nodiscard]] std::size_t max_order() const noexcept {
        std::size_t k = 0;
        for (const auto& r : regimes) k = std::max(k, r.order());
        return k;
    }

    /// Index of the regime whose interval contains z. Values equal to a threshold
    /// belong to the lower regime.
    [[nodiscard]] std::size_t regime_of(double z) const noexcept {
        return static_cast<std::size_t>(
            std::lower_bound(thresholds.begin(), thresholds.end(), z) - thresholds.begin());
    }

    /// Throws InvalidSpec when the structural invariants do not hold. Noise weights of
    /// exactly zero are accepted (noiseless degenerate processes); operations that divide
    /// by h reject them separately.
    void validate() const {
        if (regimes.empty()) throw Error(ErrorCode::InvalidSpec, "at least one regime is required");
        if (thresholds.size() + 1 != regimes.size())
            throw Error(ErrorCode::InvalidSpec, "need exactly l-1 thresholds for l regimes");
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            if (!std::isfinite(thresholds[i]))
                throw Error(ErrorCode::InvalidSpec, "thresholds must be finite");
            if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
                throw Error(ErrorCode::InvalidSpec, "thresholds must be strictly increasing");
        }
        for (const auto& r : regimes) {
            if (!std::isfinite(r.intercept) || !std::isfinite(r.noise_weight))
                throw Error(ErrorCode::InvalidSpec, "regime parameters must be finite");
            if (r.noise_weight < 0.0)
                throw Error(ErrorCode::InvalidSpec, "noise weights must be nonnegative");
            for (double a : r.ar)
                if (!std::isfinite(a)) throw Error(ErrorCode::InvalidSpec, "AR coefficients must be finite");
        }
    }
};

/// Stationary Gaussian AR(1) threshold process Z_t = phi Z_{t-1} + tau_t, tau_t ~ N(0, tau_var).
struct GaussianAR1 {
    double phi = 0.0;
    double tau_var = 1.0;

    [[nodiscard]] double stationary_variance() const noexcept { return tau_var / (1.0 - phi * phi); }
};

/// An observed threshold series; probabilities become empirical frequencies.
struct ObservedZ {
    std::vector<double> series;
};

struct ZProcessSpec {
    std::variant<GaussianAR1, ObservedZ> variant;

    [[nodiscard]] bool is_gaussian() const noexcept { return std::holds_alternative<GaussianAR1>(variant); }

    void validate() const {
        if (const auto* g = std::get_if<GaussianAR1>(&variant)) {
            if (!(std::abs(g->phi) < 1.0))
                throw Error(ErrorCode::InvalidSpec, "GaussianAR1 requires |phi| < 1");
            if (!(g->tau_var > 0.0)) throw Error(ErrorCode::InvalidSpec, "tau_var must be positive");
        } else {
            const auto& o = std::get<ObservedZ>(variant);
            if (o.series.empty()) throw Error(ErrorCode::InvalidSpec, "observed Z series is empty");
        }
    }
};

struct PsiWeights {
    std::vector<double> psi;  // psi_0 = 1, ..., psi_M
    double psi_sum = 1.0;       // psi(1)
    double sigma_bar_sq = 1.0;  // sum psi_i^2
};

struct RegimeProbs {
    std::vector<double> marginal;
    std::vector<std::size_t> lags;                          // omegas for `joint`
    std::vector<std::vector<std::vector<double>>> joint;    // joint[w][j][k] = P(Z_t in B_j, Z_{t-w} in B_k)

    /// Marginal-only probabilities, e.g. fixed regime weights quoted for a fitted model.
    static RegimeProbs from_marginal(std::vector<double> p) {
        RegimeProbs out;
        out.marginal = std::move(p);
        return out;
    }

    void validate(std::size_t regimes) const {
        if (marginal.size() != regimes)
            throw Error(ErrorCode::InvalidArgument, "regime probability count does not match the spec");
        double total = 0.0;
        for (double p : marginal) {
            if (!(p >= 0.0)) throw Error(ErrorCode::InvalidArgument, "regime probabilities must be nonnegative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw Error(ErrorCode::InvalidArgument, "regime probabilities must sum to one");
    }
};

struct RegimeMoments {
    double mean = 0.0;             // mu_{j,1} = a_0 / phi(1)
    double second_moment = 0.0;    // mu_{j,2}
    double variance = 0.0;         // sigma_j^2 = (h sigma_bar_j)^2
};

struct MomentSummary {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;
    std::vector<RegimeMoments> per_regime;
};

}  // namespace tarlev::core
