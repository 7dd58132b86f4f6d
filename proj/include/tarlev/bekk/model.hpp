#pragma once

#include "tarlev/error.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace tarlev::bekk {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Bivariate VAR(p) mean with an asymmetric BEKK(1,1) covariance:
///   R_t = mu + sum_j Gamma_j R_{t-j} + a_t,
///   H_t = C'C + Lambda' a a' Lambda + Theta' H_{t-1} Theta + D' z z' D,  z = a o 1(a < 0),
/// all with the lagged a_{t-1}.
struct BekkParams {
    Vec2 mu = Vec2::Zero();
    std::vector<Mat2> gamma;  // Gamma_1..Gamma_p
    Mat2 C = Mat2::Zero();    // upper triangular
    Mat2 Lambda = Mat2::Zero();
    Mat2 Theta = Mat2::Zero();
    Mat2 D = Mat2::Zero();

    [[nodiscard]] std::size_t p() const noexcept { return gamma.size(); }

    /// 2 + 4p + 3 + 12 free parameters.
    [[nodiscard]] std::size_t parameter_count() const noexcept { return 17 + 4 * p(); }

    void validate() const {
        if (C(1, 0) != 0.0) throw Error(ErrorCode::InvalidArgument, "C must be upper triangular");
        auto finite = [](const auto& m) { return m.allFinite(); };
        bool ok = finite(mu) && finite(C) && finite(Lambda) && finite(Theta) && finite(D);
        for (const auto& g : gamma) ok = ok && finite(g);
        if (!ok) throw Error(ErrorCode::InvalidArgument, "BEKK parameters must be finite");
    }

    /// Full rank of C or Theta keeps every H_t positive definite.
    [[nodiscard]] bool admissible() const {
        return std::abs(C.determinant()) > 0.0 || std::abs(Theta.determinant()) > 0.0;
    }

    [[nodiscard]] Mat2 intercept_covariance() const { return C.transpose() * C; }

    /// Order: mu, Gamma_j row-major, c11 c12 c22, Lambda, Theta, D row-major.
    [[nodiscard]] Eigen::VectorXd to_vector() const {
        Eigen::VectorXd v(static_cast<Eigen::Index>(parameter_count()));
        Eigen::Index i = 0;
        v(i++) = mu(0);
        v(i++) = mu(1);
        auto put = [&](const Mat2& m) {
            v(i++) = m(0, 0);
            v(i++) = m(0, 1);
            v(i++) = m(1, 0);
            v(i++) = m(1, 1);
        };
        for (const auto& g : gamma) put(g);
        v(i++) = C(0, 0);
        v(i++) = C(0, 1);
        v(i++) = C(1, 1);
        put(Lambda);
        put(Theta);
        put(D);
        return v;
    }

    static BekkParams from_vector(const Eigen::VectorXd& v, std::size_t p) {
        BekkParams out;
        if (static_cast<std::size_t>(v.size()) != 17 + 4 * p)
            throw Error(ErrorCode::InvalidArgument, "parameter vector has the wrong length");
        Eigen::Index i = 0;
        out.mu << v(0), v(1);
        i = 2;
        auto get = [&]() {
            Mat2 m;
            m << v(i), v(i + 1), v(i + 2), v(i + 3);
            i += 4;
            return m;
        };
        for (std::size_t j = 0; j < p; ++j) out.gamma.push_back(get());
        out.C << v(i), v(i + 1), 0.0, v(i + 2);
        i += 3;
        out.Lambda = get();
        out.Theta = get();
        out.D = get();
        return out;
    }

    static std::vector<std::string> parameter_names(std::size_t p) {
        std::vector<std::string> n{"mu1", "mu2"};
        auto mat = [&](const std::string& base) {
            for (const char* s : {"11", "12", "21", "22"}) n.push_back(base + s);
        };
        for (std::size_t j = 0; j < p; ++j) mat("gamma" + std::to_string(j + 1) + "_");
        n.insert(n.end(), {"c11", "c12", "c22"});
        mat("lambda");
        mat("theta");
        mat("d");
        return n;
    }
};

/// Spectral radius of Lambda(x)Lambda + Theta(x)Theta + D(x)D / 2; below one the covariance
/// recursion is mean reverting under symmetric innovations.
inline double persistence(const BekkParams& b) {
    Eigen::Matrix4d K = Eigen::Matrix4d::Zero();
    auto kron = [](const Mat2& a) {
        Eigen::Matrix4d k;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) k.block<2, 2>(2 * i, 2 * j) = a(i, j) * a;
        return k;
    };
    K = kron(b.Lambda) + kron(b.Theta) + 0.5 * kron(b.D);
    return K.eigenvalues().cwiseAbs().maxCoeff();
}

inline Vec2 negative_part(const Vec2& a) { return a.cwiseMin(0.0); }

/// One step of the covariance recursion.
inline Mat2 next_covariance(const BekkParams& b, const Vec2& a_prev, const Mat2& h_prev) {
    const Vec2 z = negative_part(a_prev);
    const Vec2 la = b.Lambda.transpose() * a_prev;
    const Vec2 dz = b.D.transpose() * z;
    Mat2 h = b.C.transpose() * b.C + la * la.transpose() + b.Theta.transpose() * h_prev * b.Theta + dz * dz.transpose();
    h(1, 0) = h(0, 1) = 0.5 * (h(0, 1) + h(1, 0));
    return h;
}

struct FilterOutput {
    std::vector<Vec2> residuals;      // a_t for t = p..T-1
    std::vector<Mat2> covariances;    // H_t
    std::vector<Vec2> standardized;   // L_t^-1 a_t with H_t = L_t L_t'
    std::vector<double> loglik_terms; // l_t
    double loglik = 0.0;
};

/// VAR(p) residuals of a bivariate return series (rows are observations).
inline std::vector<Vec2> var_residuals(const BekkParams& b, const std::vector<Vec2>& r) {
    const std::size_t p = b.p();
    std::vector<Vec2> a;
    a.reserve(r.size() > p ? r.size() - p : 0);
    for (std::size_t t = p; t < r.size(); ++t) {
        Vec2 m = b.mu;
        for (std::size_t j = 0; j < p; ++j) m += b.gamma[j] * r[t - 1 - j];
        a.push_back(r[t] - m);
    }
    return a;
}

/// Runs the covariance recursion with H for the first residual set to h0. Throws
/// NonPositiveDefinite when any H_t fails its Cholesky factorization.
inline FilterOutput bekk_filter(const BekkParams& b, const std::vector<Vec2>& returns, const Mat2& h0) {
    b.validate();
    if (returns.size() <= b.p()) throw Error(ErrorCode::InsufficientData, "series must be longer than the VAR order");
    const Eigen::LLT<Mat2> h0_llt(h0);
    if (!h0.isApprox(h0.transpose(), 1e-12) || h0_llt.info() != Eigen::Success)
        throw Error(ErrorCode::NonPositiveDefinite, "h0 must be symmetric positive definite");

    FilterOutput out;
    out.residuals = var_residuals(b, returns);
    const std::size_t n = out.residuals.size();
    out.covariances.reserve(n);
    out.standardized.reserve(n);
    out.loglik_terms.reserve(n);
    Mat2 h = h0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) h = next_covariance(b, out.residuals[t - 1], h);
        const Eigen::LLT<Mat2> llt(h);
        if (llt.info() != Eigen::Success || !(llt.matrixL()(0, 0) > 0.0) || !(llt.matrixL()(1, 1) > 0.0))
            throw Error(ErrorCode::NonPositiveDefinite, "H_t is not positive definite");
        const Mat2 L = llt.matrixL();
        const Vec2 e = L.triangularView<Eigen::Lower>().solve(out.residuals[t]);
        const double log_det = 2.0 * (std::log(L(0, 0)) + std::log(L(1, 1)));
        const double lt = -std::log(2.0 * std::numbers::pi) - 0.5 * log_det - 0.5 * e.squaredNorm();
        out.covariances.push_back(h);
        out.standardized.push_back(e);
        out.loglik_terms.push_back(lt);
        out.loglik += lt;
    }
    return out;
}

/// sum_t l_t with l_t = -ln 2pi - ln|H_t| / 2 - a_t' H_t^-1 a_t / 2.
inline double bekk_log_likelihood(const BekkParams& b, const std::vector<Vec2>& returns, const Mat2& h0) {
    return bekk_filter(b, returns, h0).loglik;
}

/// Sample covariance (divisor n) of VAR residuals, the default h0.
inline Mat2 residual_covariance(const std::vector<Vec2>& a) {
    if (a.empty()) throw Error(ErrorCode::InsufficientData, "no residuals");
    Vec2 m = Vec2::Zero();
    for (const auto& v : a) m += v;
    m /= static_cast<double>(a.size());
    Mat2 s = Mat2::Zero();
    for (const auto& v : a) s += (v - m) * (v - m).transpose();
    return s / static_cast<double>(a.size());
}

struct BekkPath {
    std::vector<Vec2> returns;
    std::vector<Vec2> innovations;
    std::vector<Mat2> covariances;
};

/// Gaussian simulation started from H = C'C and zero returns; the first burn_in draws are
/// discarded.
template <class Rng>
BekkPath simulate_bekk(const BekkParams& b, std::size_t n, std::size_t burn_in, Rng& rng) {
    b.validate();
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t p = b.p();
    std::vector<Vec2> r(p, Vec2::Zero());
    Vec2 a_prev = Vec2::Zero();
    Mat2 h = b.intercept_covariance();
    BekkPath out;
    for (std::size_t t = 0; t < n + burn_in; ++t) {
        h = next_covariance(b, a_prev, h);
        const Eigen::LLT<Mat2> llt(h);
        if (llt.info() != Eigen::Success) throw Error(ErrorCode::NonPositiveDefinite, "simulated H_t lost definiteness");
        const Vec2 eta(normal(rng), normal(rng));
        const Vec2 a = llt.matrixL() * eta;
        Vec2 x = b.mu + a;
        for (std::size_t j = 0; j < p; ++j) x += b.gamma[j] * r[r.size() - 1 - j];
        r.push_back(x);
        a_prev = a;
        if (t >= burn_in) {
            out.returns.push_back(x);
            out.innovations.push_back(a);
            out.covariances.push_back(h);
        }
    }
    return out;
}

inline nlohmann::json matrix_json(const Mat2& m) {
    return nlohmann::json::array({{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}});
}

inline Mat2 matrix_from_json(const nlohmann::json& j) {
    Mat2 m;
    m << j.at(0).at(0).get<double>(), j.at(0).at(1).get<double>(), j.at(1).at(0).get<double>(),
        j.at(1).at(1).get<double>();
    return m;
}

inline nlohmann::json params_to_json(const BekkParams& b) {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& m : b.gamma) g.push_back(matrix_json(m));
    return {{"p", b.p()},
            {"mu", {b.mu(0), b.mu(1)}},
            {"gamma", g},
            {"C", matrix_json(b.C)},
            {"Lambda", matrix_json(b.Lambda)},
            {"Theta", matrix_json(b.Theta)},
            {"D", matrix_json(b.D)}};
}

inline BekkParams params_from_json(const nlohmann::json& j) {
    try {
        BekkParams b;
        const auto mu = j.at("mu").get<std::vector<double>>();
        if (mu.size() != 2) throw Error(ErrorCode::InvalidSpec, "mu must have two entries");
        b.mu << mu[0], mu[1];
        for (const auto& g : j.at("gamma")) b.gamma.push_back(matrix_from_json(g));
        if (j.contains("p") && j.at("p").get<std::size_t>() != b.gamma.size())
            throw Error(ErrorCode::InvalidSpec, "`p` does not match the number of Gamma matrices");
        b.C = matrix_from_json(j.at("C"));
        b.Lambda = matrix_from_json(j.at("Lambda"));
        b.Theta = matrix_from_json(j.at("Theta"));
        b.D = matrix_from_json(j.at("D"));
        if (b.C(1, 0) != 0.0) throw Error(ErrorCode::InvalidSpec, "C must be upper triangular");
        b.validate();
        return b;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidSpec, e.what());
    }
}

}  // namespace tarlev::bekk
