#pragma once

#include "tarlev/error.hpp"
#include "tarlev/stats/distributions.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace tarlev::stats {

struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::VectorXd se;
    Eigen::VectorXd t_stat;
    Eigen::VectorXd residuals;
    double ssr = 0.0;
    double sigma = 0.0;  // residual standard deviation, divisor n - p
    double r_squared = 0.0;
    Eigen::Index n = 0;
    Eigen::Index p = 0;
};

/// Classical least squares with homoskedastic standard errors. Throws SingularDesign when
/// the design is rank deficient.
inline OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (n <= p) throw Error(ErrorCode::InsufficientData, "regression needs more observations than regressors");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) throw Error(ErrorCode::SingularDesign, "design matrix is rank deficient");

    OlsFit fit;
    fit.n = n;
    fit.p = p;
    fit.coef = qr.solve(y);
    fit.residuals = y - X * fit.coef;
    fit.ssr = fit.residuals.squaredNorm();
    const double dof = static_cast<double>(n - p);
    fit.sigma = std::sqrt(fit.ssr / dof);
    const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
    fit.se = (xtx_inv.diagonal() * (fit.ssr / dof)).array().sqrt();
    fit.t_stat = fit.coef.array() / fit.se.array();
    const double ybar = y.mean();
    const double sst = (y.array() - ybar).square().sum();
    fit.r_squared = sst > 0.0 ? 1.0 - fit.ssr / sst : 0.0;
    return fit;
}

struct FTest {
    double statistic = 0.0;
    double df1 = 0.0;
    double df2 = 0.0;
    double p_value = 1.0;
};

/// F test that every slope (all columns but the first, assumed the intercept) is zero.
inline FTest slopes_f_test(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const auto fit = ols(X, y);
    const double sst = (y.array() - y.mean()).square().sum();
    FTest out;
    out.df1 = static_cast<double>(fit.p - 1);
    out.df2 = static_cast<double>(fit.n - fit.p);
    out.statistic = ((sst - fit.ssr) / out.df1) / (fit.ssr / out.df2);
    out.p_value = f_upper_tail(out.statistic, out.df1, out.df2);
    return out;
}

}  // namespace tarlev::stats
