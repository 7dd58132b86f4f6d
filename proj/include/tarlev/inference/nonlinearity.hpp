#pragma once

#include "tarlev/error.hpp"
#include "tarlev/stats/distributions.hpp"
#include "tarlev/stats/ols.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace tarlev::inference {

struct DelayStatistic {
    std::size_t delay = 0;
    double f_statistic = 0.0;
    double df1 = 0.0;
    double df2 = 0.0;
    double p_value = 1.0;
};

struct NonlinearityResult {
    double f_statistic = 0.0;
    double p_value = 1.0;             // F-distribution p-value at the best delay
    double p_value_bonferroni = 1.0;  // best-delay p-value times the number of delays tried
    std::size_t best_delay = 0;
    std::vector<DelayStatistic> per_delay;
};

/// Fraction of arranged observations used to start the recursive least squares.
inline constexpr double kStartupFraction = 0.2;

/// Arranged-autoregression F test of linearity against a threshold alternative driven by z.
///
/// For each delay d the cases (x_t; 1, x_{t-1}, ..., x_{t-k}) are sorted by z_{t-d}. Forward
/// recursive least squares starting from the first 20% of arranged cases produces
/// standardized predictive residuals, which are regressed on the same regressors. Under
/// linearity the residuals are orthogonal to the regressors and the statistic is
/// F(k+1, m-k-1) with m predictive residuals.
inline NonlinearityResult nonlinearity_test(std::span<const double> x, std::span<const double> z, std::size_t k,
                                            const std::vector<std::size_t>& delays) {
    if (x.size() != z.size()) throw Error(ErrorCode::InvalidArgument, "x and z must be aligned");
    if (delays.empty()) throw Error(ErrorCode::InvalidArgument, "no delay candidates");
    if (x.size() <= 3 * (k + 1)) throw Error(ErrorCode::InsufficientData, "series too short for the arranged regression");

    const auto p = static_cast<Eigen::Index>(k + 1);
    NonlinearityResult out;
    double best = -1.0;
    for (std::size_t d : delays) {
        const std::size_t start = std::max(k, d);
        if (start + 3 * (k + 1) >= x.size())
            throw Error(ErrorCode::InsufficientData, "delay leaves too few observations");
        const std::size_t n = x.size() - start;
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), start);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return z[a - d] < z[b - d]; });

        Eigen::MatrixXd W(static_cast<Eigen::Index>(n), p);
        Eigen::VectorXd y(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t t = order[i];
            const auto row = static_cast<Eigen::Index>(i);
            W(row, 0) = 1.0;
            for (std::size_t lag = 1; lag <= k; ++lag) W(row, static_cast<Eigen::Index>(lag)) = x[t - lag];
            y(row) = x[t];
        }

        const auto m0 = static_cast<Eigen::Index>(
            std::max<double>(static_cast<double>(p) + 1.0, std::floor(kStartupFraction * static_cast<double>(n))));
        const auto init = stats::ols(W.topRows(m0), y.head(m0));
        Eigen::VectorXd beta = init.coef;
        Eigen::MatrixXd P = (W.topRows(m0).transpose() * W.topRows(m0)).inverse();

        const Eigen::Index m = static_cast<Eigen::Index>(n) - m0;
        Eigen::VectorXd pred(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const Eigen::VectorXd w = W.row(m0 + i).transpose();
            const Eigen::VectorXd Pw = P * w;
            const double denom = 1.0 + w.dot(Pw);
            const double e = y(m0 + i) - w.dot(beta);
            pred(i) = e / std::sqrt(denom);
            const Eigen::VectorXd gain = Pw / denom;
            beta += gain * e;
            P -= gain * Pw.transpose();
        }

        const auto fit = stats::ols(W.bottomRows(m), pred);
        DelayStatistic ds;
        ds.delay = d;
        ds.df1 = static_cast<double>(p);
        ds.df2 = static_cast<double>(m - p);
        ds.f_statistic = ((pred.squaredNorm() - fit.ssr) / ds.df1) / (fit.ssr / ds.df2);
        ds.p_value = stats::f_upper_tail(ds.f_statistic, ds.df1, ds.df2);
        out.per_delay.push_back(ds);
        if (ds.f_statistic > best) {
            best = ds.f_statistic;
            out.f_statistic = ds.f_statistic;
            out.p_value = ds.p_value;
            out.best_delay = d;
        }
    }
    out.p_value_bonferroni = std::min(1.0, out.p_value * static_cast<double>(delays.size()));
    return out;
}

}  // namespace tarlev::inference
