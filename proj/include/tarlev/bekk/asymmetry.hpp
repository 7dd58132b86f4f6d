#pragma once

#include "tarlev/error.hpp"
#include "tarlev/stats/ols.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <span>

namespace tarlev::bekk {

struct AsymmetryTests {
    stats::FTest sign_bias;  // joint sign and size bias
    stats::FTest leverage;   // eta_t^2 on eta_{t-1..t-k}
};

/// Engle-Ng joint test: eta_t^2 on (1, S-_{t-1}, S-_{t-1} eta_{t-1}, S+_{t-1} eta_{t-1}) with
/// S- the indicator of a negative lagged residual, F(3, n-4). The leverage regression
/// eta_t^2 = d0 + d1 eta_{t-1} + ... + dk eta_{t-k} tests all slopes zero, F(k, n-k-1).
inline AsymmetryTests asymmetry_tests(std::span<const double> eta, std::size_t k = 5) {
    if (eta.size() < 50) throw Error(ErrorCode::InsufficientData, "asymmetry tests need at least 50 residuals");
    if (k == 0 || eta.size() <= 3 * (k + 1)) throw Error(ErrorCode::InvalidArgument, "invalid leverage lag count");
    bool any_negative = false;
    bool any_positive = false;
    for (std::size_t t = 0; t + 1 < eta.size(); ++t) {
        any_negative = any_negative || eta[t] < 0.0;
        any_positive = any_positive || eta[t] > 0.0;
    }
    if (!any_negative || !any_positive)
        throw Error(ErrorCode::DegenerateResiduals, "sign-bias regressors need residuals of both signs");

    AsymmetryTests out;
    {
        const auto n = static_cast<Eigen::Index>(eta.size() - 1);
        Eigen::MatrixXd X(n, 4);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double prev = eta[static_cast<std::size_t>(i)];
            const double neg = prev < 0.0 ? 1.0 : 0.0;
            X(i, 0) = 1.0;
            X(i, 1) = neg;
            X(i, 2) = neg * prev;
            X(i, 3) = (1.0 - neg) * prev;
            y(i) = eta[static_cast<std::size_t>(i) + 1] * eta[static_cast<std::size_t>(i) + 1];
        }
        try {
            out.sign_bias = stats::slopes_f_test(X, y);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::SingularDesign) throw Error(ErrorCode::DegenerateResiduals, e.what());
            throw;
        }
    }
    {
        const auto n = static_cast<Eigen::Index>(eta.size() - k);
        Eigen::MatrixXd X(n, static_cast<Eigen::Index>(k + 1));
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::size_t t = static_cast<std::size_t>(i) + k;
            X(i, 0) = 1.0;
            for (std::size_t lag = 1; lag <= k; ++lag) X(i, static_cast<Eigen::Index>(lag)) = eta[t - lag];
            y(i) = eta[t] * eta[t];
        }
        try {
            out.leverage = stats::slopes_f_test(X, y);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::SingularDesign) throw Error(ErrorCode::DegenerateResiduals, e.what());
            throw;
        }
    }
    return out;
}

inline nlohmann::json asymmetry_json(const AsymmetryTests& a) {
    auto f = [](const stats::FTest& t) {
        return nlohmann::json{{"f_statistic", t.statistic}, {"df1", t.df1}, {"df2", t.df2}, {"p_value", t.p_value}};
    };
    return {{"sign_bias_joint", f(a.sign_bias)}, {"leverage_regression", f(a.leverage)}};
}

}  // namespace tarlev::bekk
