#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <string>

namespace tarlev::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;

/// Central-difference step 1e-5 * (1 + |theta_i|).
inline double gradient_step(double theta) { return 1e-5 * (1.0 + std::abs(theta)); }

inline Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = gradient_step(x(i));
        probe(i) = x(i) + h;
        const double up = f(probe);
        probe(i) = x(i) - h;
        const double down = f(probe);
        probe(i) = x(i);
        g(i) = (up - down) / (2.0 * h);
    }
    return g;
}

/// Symmetric central-difference Hessian with steps 1e-4 * (1 + |theta_i|).
inline Eigen::MatrixXd numeric_hessian(const Objective& f, const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd h(n);
    for (Eigen::Index i = 0; i < n; ++i) h(i) = 1e-4 * (1.0 + std::abs(x(i)));
    const double f0 = f(x);
    Eigen::MatrixXd H(n, n);
    Eigen::VectorXd p = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        p(i) = x(i) + h(i);
        const double up = f(p);
        p(i) = x(i) - h(i);
        const double down = f(p);
        p(i) = x(i);
        H(i, i) = (up - 2.0 * f0 + down) / (h(i) * h(i));
        for (Eigen::Index j = 0; j < i; ++j) {
            p(i) = x(i) + h(i);
            p(j) = x(j) + h(j);
            const double pp = f(p);
            p(j) = x(j) - h(j);
            const double pm = f(p);
            p(i) = x(i) - h(i);
            const double mm = f(p);
            p(j) = x(j) + h(j);
            const double mp = f(p);
            p(i) = x(i);
            p(j) = x(j);
            H(i, j) = H(j, i) = (pp - pm - mp + mm) / (4.0 * h(i) * h(j));
        }
    }
    return H;
}

struct BfgsOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;  // on ||g||_inf / (1 + |f|)
    double function_tolerance = 1e-12;  // relative decrease
    int max_line_search = 60;
};

struct BfgsResult {
    Eigen::VectorXd x;
    double value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd gradient;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string message;
};

/// Quasi-Newton minimization with an inverse-Hessian BFGS update, numerical gradients and a
/// backtracking Armijo line search. Non-finite objective values are treated as inadmissible
/// and shrink the step.
inline BfgsResult bfgs_minimize(const Objective& objective, Eigen::VectorXd x, const BfgsOptions& opt = {}) {
    BfgsResult out;
    const Objective f = [&](const Eigen::VectorXd& v) {
        ++out.evaluations;
        return objective(v);
    };
    double fx = f(x);
    if (!std::isfinite(fx)) {
        out.x = x;
        out.value = fx;
        out.message = "objective is not finite at the starting point";
        return out;
    }
    Eigen::VectorXd g = numeric_gradient(f, x);
    const Eigen::Index n = x.size();
    Eigen::MatrixXd Hinv = Eigen::MatrixXd::Identity(n, n);
    bool scaled = false;

    for (int it = 0; it < opt.max_iterations; ++it) {
        if (g.lpNorm<Eigen::Infinity>() <= opt.gradient_tolerance * (1.0 + std::abs(fx))) {
            out.converged = true;
            out.message = "gradient tolerance reached";
            break;
        }
        Eigen::VectorXd d = -Hinv * g;
        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            Hinv.setIdentity();
            d = -g;
            slope = -g.squaredNorm();
        }
        double step = 1.0;
        double fn = 0.0;
        Eigen::VectorXd xn;
        bool accepted = false;
        for (int ls = 0; ls < opt.max_line_search; ++ls) {
            xn = x + step * d;
            fn = f(xn);
            if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        out.iterations = it + 1;
        if (!accepted) {
            out.converged = g.lpNorm<Eigen::Infinity>() <= 1e2 * opt.gradient_tolerance * (1.0 + std::abs(fx));
            out.message = "line search failed";
            break;
        }
        const Eigen::VectorXd gn = numeric_gradient(f, xn);
        const Eigen::VectorXd s = xn - x;
        const Eigen::VectorXd y = gn - g;
        const double relative_change = std::abs(fx - fn) / (1.0 + std::abs(fx));
        x = xn;
        g = gn;
        fx = fn;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (!scaled) {
                Hinv *= sy / y.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
            Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) + rho * s * s.transpose();
        }
        if (relative_change < opt.function_tolerance) {
            out.converged = true;
            out.message = "function tolerance reached";
            break;
        }
    }
    if (out.message.empty()) out.message = "iteration limit reached";
    out.x = x;
    out.value = fx;
    out.gradient = g;
    return out;
}

}  // namespace tarlev::optim
