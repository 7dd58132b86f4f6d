#pragma once

#include "tarlev/error.hpp"
#include "tarlev/stats/descriptive.hpp"
#include "tarlev/stats/distributions.hpp"
#include "tarlev/stats/ols.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace tarlev::inference {

struct CusumPath {
    std::vector<double> statistic;  // index r = 1..T
    std::vector<double> lower;
    std::vector<double> upper;
    bool inside = true;
};

struct CusumResult {
    double level = 0.05;
    CusumPath cusum;
    CusumPath cusumsq;
};

namespace detail {

// Brown-Durbin-Evans boundary constant a: the lines +-a(sqrt(T) + 2r/sqrt(T)) are crossed
// with probability `level` under the null.
inline double bde_constant(double level) {
    if (std::abs(level - 0.01) < 1e-12) return 1.143;
    if (std::abs(level - 0.05) < 1e-12) return 0.948;
    if (std::abs(level - 0.10) < 1e-12) return 0.850;
    throw Error(ErrorCode::InvalidArgument, "CUSUM level must be 0.01, 0.05 or 0.10");
}

// Half-width c0 of the CUSUMSQ band at the 5% two-sided level. Durbin's (1969) table of the
// Kolmogorov-type statistic, in the response-surface form of Edgerton and Wells (1994):
//   c0 = 1.3581015/sqrt(n) - 0.6701218/n - 0.8858694/n^1.5,  n = T/2 - 1.
inline double cusumsq_c0(double level, std::size_t t_count) {
    if (std::abs(level - 0.05) >= 1e-12) throw Error(ErrorCode::InvalidArgument, "CUSUMSQ bands are tabulated at the 5% level only");
    const double n = 0.5 * static_cast<double>(t_count) - 1.0;
    return 1.3581015 / std::sqrt(n) - 0.6701218 / n - 0.8858694 / std::pow(n, 1.5);
}

}  // namespace detail

/// CUSUM and CUSUMSQ stability paths of a residual series with their bands.
inline CusumResult cusum_tests(std::span<const double> residuals, double level = 0.05) {
    const std::size_t T = residuals.size();
    if (T < 20) throw Error(ErrorCode::InsufficientData, "CUSUM tests need at least 20 residuals");
    const double a = detail::bde_constant(level);
    const double sd = stats::stddev(residuals);
    double total_sq = 0.0;
    for (double e : residuals) total_sq += e * e;
    const double scale = std::max(std::abs(stats::mean(residuals)), std::sqrt(total_sq / static_cast<double>(T)));
    if (!(sd > 1e-12 * scale) || !(total_sq > 0.0))
        throw Error(ErrorCode::DegenerateResiduals, "residuals are constant");

    CusumResult out;
    out.level = level;
    const double root_t = std::sqrt(static_cast<double>(T));
    const double c0 = detail::cusumsq_c0(level, T);
    double w = 0.0;
    double sq = 0.0;
    for (std::size_t r = 1; r <= T; ++r) {
        const double e = residuals[r - 1];
        w += e / sd;
        sq += e * e;
        const double half = a * (root_t + 2.0 * static_cast<double>(r) / root_t);
        out.cusum.statistic.push_back(w);
        out.cusum.lower.push_back(-half);
        out.cusum.upper.push_back(half);
        if (std::abs(w) > half) out.cusum.inside = false;

        const double s = sq / total_sq;
        const double expected = static_cast<double>(r) / static_cast<double>(T);
        out.cusumsq.statistic.push_back(s);
        out.cusumsq.lower.push_back(expected - c0);
        out.cusumsq.upper.push_back(expected + c0);
        if (s < expected - c0 || s > expected + c0) out.cusumsq.inside = false;
    }
    return out;
}

struct Correlogram {
    std::vector<double> acf;   // lags 0..max_lag, acf[0] = 1
    std::vector<double> pacf;  // lags 0..max_lag, pacf[0] = 1
    double band = 0.0;         // 1.96 / sqrt(T)
};

/// Sample ACF and PACF (Durbin-Levinson) with the white-noise band +-1.96/sqrt(T).
inline Correlogram acf_pacf(std::span<const double> x, std::size_t max_lag) {
    const std::size_t T = x.size();
    if (T == 0 || 4 * max_lag >= T) throw Error(ErrorCode::InvalidArgument, "max_lag must be below length/4");
    const double m = stats::mean(x);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);
    if (!(c0 > 0.0)) throw Error(ErrorCode::DegenerateResiduals, "series is constant");

    Correlogram out;
    out.band = 1.96 / std::sqrt(static_cast<double>(T));
    out.acf.assign(max_lag + 1, 0.0);
    out.acf[0] = 1.0;
    for (std::size_t w = 1; w <= max_lag; ++w) {
        double c = 0.0;
        for (std::size_t t = w; t < T; ++t) c += (x[t] - m) * (x[t - w] - m);
        out.acf[w] = c / c0;
    }

    out.pacf.assign(max_lag + 1, 0.0);
    out.pacf[0] = 1.0;
    std::vector<double> phi(max_lag + 1, 0.0);
    std::vector<double> prev(max_lag + 1, 0.0);
    double v = 1.0;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = out.acf[k];
        for (std::size_t j = 1; j < k; ++j) num -= prev[j] * out.acf[k - j];
        const double pkk = num / v;
        phi[k] = pkk;
        for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - pkk * prev[k - j];
        v *= (1.0 - pkk * pkk);
        out.pacf[k] = pkk;
        prev = phi;
    }
    return out;
}

struct PortmanteauResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_value = 1.0;
};

/// Ljung-Box Q over lags 1..h; `fitted_params` is subtracted from the degrees of freedom.
inline PortmanteauResult ljung_box(std::span<const double> x, std::size_t h, std::size_t fitted_params = 0) {
    if (h <= fitted_params) throw Error(ErrorCode::InvalidArgument, "lags must exceed the fitted parameter count");
    if (x.size() <= h + 1) throw Error(ErrorCode::InsufficientData, "series shorter than the lag count");
    const double T = static_cast<double>(x.size());
    const double m = stats::mean(x);
    double c0 = 0.0;
    for (double v : x) c0 += (v - m) * (v - m);
    if (!(c0 > 0.0)) throw Error(ErrorCode::DegenerateResiduals, "series is constant");
    double q = 0.0;
    for (std::size_t w = 1; w <= h; ++w) {
        double c = 0.0;
        for (std::size_t t = w; t < x.size(); ++t) c += (x[t] - m) * (x[t - w] - m);
        const double r = c / c0;
        q += r * r / (T - static_cast<double>(w));
    }
    PortmanteauResult out;
    out.statistic = T * (T + 2.0) * q;
    out.df = static_cast<double>(h - fitted_params);
    out.p_value = stats::chi2_upper_tail(out.statistic, out.df);
    return out;
}

/// Engle's ARCH-LM test: T R^2 of e_t^2 on (1, e_{t-1}^2, ..., e_{t-q}^2), chi^2(q).
inline PortmanteauResult arch_lm(std::span<const double> e, std::size_t q) {
    if (q == 0) throw Error(ErrorCode::InvalidArgument, "ARCH-LM needs q >= 1");
    if (e.size() <= 3 * (q + 1)) throw Error(ErrorCode::InsufficientData, "series too short for ARCH-LM");
    const auto n = static_cast<Eigen::Index>(e.size() - q);
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(q + 1));
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::size_t t = static_cast<std::size_t>(i) + q;
        X(i, 0) = 1.0;
        for (std::size_t lag = 1; lag <= q; ++lag) X(i, static_cast<Eigen::Index>(lag)) = e[t - lag] * e[t - lag];
        y(i) = e[t] * e[t];
    }
    PortmanteauResult out;
    out.statistic = static_cast<double>(n) * stats::ols(X, y).r_squared;
    out.df = static_cast<double>(q);
    out.p_value = stats::chi2_upper_tail(out.statistic, out.df);
    return out;
}

/// Jarque-Bera normality test, chi^2(2).
inline PortmanteauResult jarque_bera(std::span<const double> x) {
    if (x.size() < 8) throw Error(ErrorCode::InsufficientData, "Jarque-Bera needs at least 8 observations");
    if (!(stats::central_moment(x, 2) > 0.0)) throw Error(ErrorCode::DegenerateResiduals, "series is constant");
    const double s = stats::skewness(x);
    const double k = stats::kurtosis(x);
    PortmanteauResult out;
    out.statistic = static_cast<double>(x.size()) / 6.0 * (s * s + 0.25 * (k - 3.0) * (k - 3.0));
    out.df = 2.0;
    out.p_value = stats::chi2_upper_tail(out.statistic, 2.0);
    return out;
}

struct ValidationReport {
    std::vector<double> residuals;
    Correlogram correlogram;
    Correlogram squared_correlogram;  // of residuals^2
    CusumResult cusum;
    PortmanteauResult ljung_box;
    PortmanteauResult arch_lm;
    PortmanteauResult jarque_bera;

    [[nodiscard]] std::size_t acf_lags_outside_band() const {
        std::size_t n = 0;
        for (std::size_t w = 1; w < correlogram.acf.size(); ++w)
            if (std::abs(correlogram.acf[w]) > correlogram.band) ++n;
        return n;
    }
};

/// Residual diagnostics battery used to validate a fitted TAR model.
inline ValidationReport validate_residuals(std::vector<double> residuals, std::size_t max_lag = 20,
                                           double level = 0.05) {
    ValidationReport out;
    const std::size_t lags = std::min(max_lag, residuals.size() > 4 ? (residuals.size() - 1) / 4 : 0);
    out.correlogram = acf_pacf(residuals, lags);
    std::vector<double> sq(residuals.size());
    std::transform(residuals.begin(), residuals.end(), sq.begin(), [](double e) { return e * e; });
    out.squared_correlogram = acf_pacf(sq, lags);
    out.cusum = cusum_tests(residuals, level);
    out.ljung_box = ljung_box(residuals, lags);
    out.arch_lm = arch_lm(residuals, std::min<std::size_t>(5, lags));
    out.jarque_bera = jarque_bera(residuals);
    out.residuals = std::move(residuals);
    return out;
}

}  // namespace tarlev::inference
