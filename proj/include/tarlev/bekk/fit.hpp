#pragma once

#include "tarlev/bekk/model.hpp"
#include "tarlev/optim/bfgs.hpp"
#include "tarlev/stats/distributions.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace tarlev::bekk {

struct BekkFitOptions {
    optim::BfgsOptions optimizer{};
    std::optional<Mat2> h0;  // defaults to the residual covariance at the initial mean parameters
    bool compute_standard_errors = true;
};

struct BekkFit {
    BekkParams params;
    double loglik = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd estimates;
    Eigen::VectorXd standard_errors;  // NaN where the Hessian is not invertible
    Eigen::VectorXd t_statistics;
    std::vector<std::string> names;
    Mat2 h0 = Mat2::Identity();
    int iterations = 0;
    bool converged = false;
    std::string message;
};

/// Removes the sign indeterminacy: rows of C flipped so its diagonal is nonnegative, and
/// Lambda, Theta, D negated when their (1,1) entry is negative. The likelihood is unchanged.
inline BekkParams apply_sign_convention(BekkParams b) {
    for (int i = 0; i < 2; ++i)
        if (b.C(i, i) < 0.0) b.C.row(i) *= -1.0;
    if (b.Lambda(0, 0) < 0.0) b.Lambda *= -1.0;
    if (b.Theta(0, 0) < 0.0) b.Theta *= -1.0;
    if (b.D(0, 0) < 0.0) b.D *= -1.0;
    return b;
}

/// OLS VAR(p) mean and a persistent diagonal starting covariance.
inline BekkParams default_start(const std::vector<Vec2>& r, std::size_t p) {
    const auto n = static_cast<Eigen::Index>(r.size() - p);
    Eigen::MatrixXd X(n, static_cast<Eigen::Index>(1 + 2 * p));
    Eigen::MatrixXd Y(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::size_t t = static_cast<std::size_t>(i) + p;
        X(i, 0) = 1.0;
        for (std::size_t j = 0; j < p; ++j) {
            X(i, static_cast<Eigen::Index>(1 + 2 * j)) = r[t - 1 - j](0);
            X(i, static_cast<Eigen::Index>(2 + 2 * j)) = r[t - 1 - j](1);
        }
        Y.row(i) = r[t].transpose();
    }
    const Eigen::MatrixXd B = X.colPivHouseholderQr().solve(Y);
    BekkParams b;
    b.mu = B.row(0).transpose();
    for (std::size_t j = 0; j < p; ++j) {
        Mat2 g;
        g.col(0) = B.row(static_cast<Eigen::Index>(1 + 2 * j)).transpose();
        g.col(1) = B.row(static_cast<Eigen::Index>(2 + 2 * j)).transpose();
        b.gamma.push_back(g);
    }
    const Mat2 s = residual_covariance(var_residuals(b, r));
    b.Lambda = 0.25 * Mat2::Identity();
    b.Theta = 0.95 * Mat2::Identity();
    b.D = 0.1 * Mat2::Identity();
    const Mat2 target = (1.0 - 0.0625 - 0.9025 - 0.005) * s;
    const Mat2 U = target.llt().matrixU();
    b.C = U;
    return b;
}

/// Maximum likelihood by BFGS on the 17 + 4p free parameters. Inadmissible points (failed
/// Cholesky or explosive covariance recursion) evaluate to +inf and are rejected by the line
/// search. Standard errors come from the inverse numerical Hessian of -loglik at the optimum.
inline BekkFit fit_bekk(const std::vector<Vec2>& returns, std::size_t p, const std::optional<BekkParams>& init = std::nullopt,
                        const BekkFitOptions& opt = {}) {
    if (returns.size() < 250) throw Error(ErrorCode::InsufficientData, "BEKK estimation needs at least 250 observations");
    const BekkParams start = init ? *init : default_start(returns, p);
    if (start.p() != p) throw Error(ErrorCode::InvalidArgument, "initial parameters have a different VAR order");
    const Mat2 h0 = opt.h0 ? *opt.h0 : residual_covariance(var_residuals(start, returns));

    const optim::Objective objective = [&](const Eigen::VectorXd& v) {
        const auto b = BekkParams::from_vector(v, p);
        if (!(persistence(b) < 1.0)) return std::numeric_limits<double>::infinity();
        try {
            return -bekk_log_likelihood(b, returns, h0);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const auto res = optim::bfgs_minimize(objective, start.to_vector(), opt.optimizer);
    BekkFit out;
    out.h0 = h0;
    out.iterations = res.iterations;
    out.converged = res.converged;
    out.message = res.message;
    out.params = apply_sign_convention(BekkParams::from_vector(res.x, p));
    out.estimates = out.params.to_vector();
    out.loglik = -objective(out.estimates);
    out.names = BekkParams::parameter_names(p);
    const auto k = out.estimates.size();
    out.standard_errors = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
    out.t_statistics = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::quiet_NaN());
    if (opt.compute_standard_errors && std::isfinite(out.loglik)) {
        const Eigen::MatrixXd H = optim::numeric_hessian(objective, out.estimates);
        if (H.allFinite()) {
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
            if (ldlt.info() == Eigen::Success) {
                const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
                for (Eigen::Index i = 0; i < k; ++i)
                    if (cov(i, i) > 0.0) {
                        out.standard_errors(i) = std::sqrt(cov(i, i));
                        out.t_statistics(i) = out.estimates(i) / out.standard_errors(i);
                    }
            }
        }
    }
    if (!out.converged) out.message = "no convergence: " + out.message;
    return out;
}

/// Estimates with t statistics grouped by block (mean, C, Lambda, Theta, D).
inline nlohmann::json fit_to_json(const BekkFit& f) {
    using nlohmann::json;
    auto entry = [&](Eigen::Index i) {
        const double t = f.t_statistics(i);
        return json{{"estimate", f.estimates(i)}, {"t_statistic", std::isfinite(t) ? json(t) : json(nullptr)}};
    };
    json blocks = json::object();
    for (Eigen::Index i = 0; i < f.estimates.size(); ++i) {
        const auto& n = f.names[static_cast<std::size_t>(i)];
        std::string block = "mean";
        if (n[0] == 'c') block = "C";
        else if (n.rfind("lambda", 0) == 0) block = "Lambda";
        else if (n.rfind("theta", 0) == 0) block = "Theta";
        else if (n[0] == 'd') block = "D";
        blocks[block][n] = entry(i);
    }
    return {{"parameters", blocks},
            {"params", params_to_json(f.params)},
            {"log_likelihood", f.loglik},
            {"h0", matrix_json(f.h0)},
            {"iterations", f.iterations},
            {"converged", f.converged},
            {"message", f.message},
            {"persistence", persistence(f.params)}};
}

}  // namespace tarlev::bekk
