#pragma once

#include "tarlev/bekk/model.hpp"
#include "tarlev/format.hpp"

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

namespace tarlev::bekk {

struct NisPoint {
    double a1 = 0.0;
    double a2 = 0.0;
    double sigma11 = 0.0;
    double sigma22 = 0.0;
    double sigma12 = 0.0;
};

/// Covariance response to the shock pair (a1, a2) with the lagged covariance held at h_bar.
inline NisPoint nis_point(const BekkParams& b, const Mat2& h_bar, double a1, double a2) {
    const Mat2 h = next_covariance(b, Vec2(a1, a2), h_bar);
    return {a1, a2, h(0, 0), h(1, 1), h(0, 1)};
}

/// Full surface over grid1 x grid2 (row-major in grid1).
inline std::vector<NisPoint> nis_surface(const BekkParams& b, const Mat2& h_bar, const std::vector<double>& grid1,
                                         const std::vector<double>& grid2) {
    if (Eigen::LLT<Mat2>(h_bar).info() != Eigen::Success || !h_bar.isApprox(h_bar.transpose()))
        throw Error(ErrorCode::NonPositiveDefinite, "h_bar must be symmetric positive definite");
    std::vector<NisPoint> out;
    out.reserve(grid1.size() * grid2.size());
    for (double a1 : grid1)
        for (double a2 : grid2) out.push_back(nis_point(b, h_bar, a1, a2));
    return out;
}

/// One-dimensional slice with a2 fixed (typically at its sample mean).
inline std::vector<NisPoint> nis_slice(const BekkParams& b, const Mat2& h_bar, double a2_fixed,
                                       const std::vector<double>& grid) {
    return nis_surface(b, h_bar, grid, {a2_fixed});
}

/// Coefficients of the sigma_11 expansion in the shocks, negative parts and lagged covariance.
struct Sigma11Expansion {
    double constant = 0.0;   // c11^2
    double a1_sq = 0.0;      // lambda11^2
    double a1_a2 = 0.0;      // 2 lambda11 lambda21
    double a2_sq = 0.0;      // lambda21^2
    double h11 = 0.0;        // theta11^2
    double h12 = 0.0;        // 2 theta11 theta21
    double h22 = 0.0;        // theta21^2
    double z1_sq = 0.0;      // d11^2
    double z1_z2 = 0.0;      // 2 d11 d21
    double z2_sq = 0.0;      // d21^2
};

inline Sigma11Expansion sigma11_expansion(const BekkParams& b) {
    const auto& L = b.Lambda;
    const auto& T = b.Theta;
    const auto& D = b.D;
    return {b.C(0, 0) * b.C(0, 0),
            L(0, 0) * L(0, 0), 2.0 * L(0, 0) * L(1, 0), L(1, 0) * L(1, 0),
            T(0, 0) * T(0, 0), 2.0 * T(0, 0) * T(1, 0), T(1, 0) * T(1, 0),
            D(0, 0) * D(0, 0), 2.0 * D(0, 0) * D(1, 0), D(1, 0) * D(1, 0)};
}

inline nlohmann::json sigma11_expansion_json(const Sigma11Expansion& e) {
    return {{"constant", e.constant}, {"a1_sq", e.a1_sq}, {"a1_a2", e.a1_a2}, {"a2_sq", e.a2_sq},
            {"h11", e.h11},           {"h12", e.h12},     {"h22", e.h22},     {"z1_sq", e.z1_sq},
            {"z1_z2", e.z1_z2},       {"z2_sq", e.z2_sq}};
}

/// a1,a2,sigma11,sigma22,sigma12
inline std::string nis_csv(const std::vector<NisPoint>& pts) {
    std::ostringstream os;
    os << "a1,a2,sigma11,sigma22,sigma12\n";
    for (const auto& p : pts)
        os << format_double(p.a1) << ',' << format_double(p.a2) << ',' << format_double(p.sigma11) << ','
           << format_double(p.sigma22) << ',' << format_double(p.sigma12) << '\n';
    return os.str();
}

}  // namespace tarlev::bekk
