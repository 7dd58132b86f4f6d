#pragma once

#include "tarlev/core/types.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace tarlev::core {

struct RegimeStationarity {
    std::vector<std::complex<double>> roots;  // zeros of phi(z) = 1 - sum a_i z^i
    std::vector<double> root_moduli;
    double max_inverse_root = 0.0;            // spectral radius of the companion matrix
    bool stationary = true;
};

struct StationarityReport {
    std::vector<RegimeStationarity> regimes;
    [[nodiscard]] bool all_stationary() const noexcept {
        for (const auto& r : regimes)
            if (!r.stationary) return false;
        return true;
    }
};

namespace detail {

// Companion matrix of z^k - a_1 z^{k-1} - ... - a_k; its eigenvalues are the inverse roots
// of phi. Trailing zero coefficients lower the effective degree.
inline RegimeStationarity analyze_polynomial(const std::vector<double>& ar) {
    RegimeStationarity out;
    std::size_t k = ar.size();
    while (k > 0 && ar[k - 1] == 0.0) --k;
    if (k == 0) return out;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) companion(0, static_cast<Eigen::Index>(i)) = ar[i];
    for (std::size_t i = 1; i < k; ++i)
        companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const auto& eig = solver.eigenvalues();
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        const std::complex<double> lambda = eig(i);
        const double m = std::abs(lambda);
        out.max_inverse_root = std::max(out.max_inverse_root, m);
        // a_k != 0 keeps every eigenvalue away from zero
        out.roots.push_back(1.0 / lambda);
        out.root_moduli.push_back(1.0 / m);
    }
    out.stationary = out.max_inverse_root < 1.0;
    return out;
}

}  // namespace detail

/// Roots of every regime polynomial; a regime is stationary iff all roots lie outside the
/// unit circle. Regimes of order zero are trivially stationary.
inline StationarityReport check_stationarity(const TarSpec& spec) {
    spec.validate();
    StationarityReport report;
    for (const auto& r : spec.regimes) report.regimes.push_back(detail::analyze_polynomial(r.ar));
    return report;
}

inline constexpr double kDefaultPsiTolerance = 1e-12;

/// MA(inf) weights of 1/phi_j(z), truncated once the geometric tail bound
/// max(|psi| over the last k terms) * rho / (1 - rho) drops below `tol`.
inline PsiWeights compute_psi_weights(const Regime& regime, double tol = kDefaultPsiTolerance) {
    const auto st = detail::analyze_polynomial(regime.ar);
    if (!st.stationary)
        throw Error(ErrorCode::NonStationaryRegime, "regime polynomial has a root on or inside the unit circle");

    PsiWeights out;
    out.psi.push_back(1.0);
    const std::size_t k = regime.order();
    if (k > 0) {
        const double rho = st.max_inverse_root;
        const double ratio = rho > 0.0 ? rho / (1.0 - rho) : 0.0;
        constexpr std::size_t kMaxTerms = 1'000'000;
        for (std::size_t m = 1; m < kMaxTerms; ++m) {
            double v = 0.0;
            for (std::size_t i = 1; i <= std::min(m, k); ++i) v += regime.ar[i - 1] * out.psi[m - i];
            out.psi.push_back(v);
            if (m < k) continue;
            double window = 0.0;
            for (std::size_t i = m + 1 - k; i <= m; ++i) window = std::max(window, std::abs(out.psi[i]));
            if (window * ratio < tol) break;
        }
    }
    out.psi_sum = 0.0;
    out.sigma_bar_sq = 0.0;
    for (double p : out.psi) {
        out.psi_sum += p;
        out.sigma_bar_sq += p * p;
    }
    // the closed form is exact; the truncated sum only serves the series in autocovariance
    out.psi_sum = 1.0 / regime.phi_at_one();
    return out;
}

inline PsiWeights compute_psi_weights(const TarSpec& spec, std::size_t regime, double tol = kDefaultPsiTolerance) {
    spec.validate();
    if (regime >= spec.regime_count()) throw Error(ErrorCode::InvalidArgument, "regime index out of range");
    return compute_psi_weights(spec.regimes[regime], tol);
}

}  // namespace tarlev::core
