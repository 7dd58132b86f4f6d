#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace tarlev::core {

inline double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace detail {

// Gauss-Legendre half-rules (negative abscissae) for 6, 12 and 20 points.
struct GaussLegendreRule {
    std::array<double, 10> x;
    std::array<double, 10> w;
    int n;
};

inline constexpr std::array<GaussLegendreRule, 3> kBvnRules{{
    {{-0.9324695142031522, -0.6612093864662647, -0.2386191860831970},
     {0.1713244923791705, 0.3607615730481384, 0.4679139345726904},
     3},
    {{-0.9815606342467191, -0.9041172563704750, -0.7699026741943050, -0.5873179542866171,
      -0.3678314989981802, -0.1252334085114692},
     {0.04717533638651177, 0.1069393259953183, 0.1600783285433464, 0.2031674267230659,
      0.2334925365383547, 0.2491470458134029},
     6},
    {{-0.9931285991850949, -0.9639719272779138, -0.9122344282513259, -0.8391169718222188,
      -0.7463319064601508, -0.6360536807265150, -0.5108670019508271, -0.3737060887154196,
      -0.2277858511416451, -0.07652652113349733},
     {0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
      0.1019301198172404, 0.1181945319615184, 0.1316886384491766, 0.1420961093183821,
      0.1491729864726037, 0.1527533871307259},
     10},
}};

// Upper orthant P(X > dh, Y > dk) for standard bivariate normal with correlation r.
// Drezner-Wesolowsky quadrature with Genz's refinements for |r| near one.
inline double bvn_upper(double dh, double dk, double r) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const auto& rule = std::abs(r) < 0.3 ? kBvnRules[0] : std::abs(r) < 0.75 ? kBvnRules[1] : kBvnRules[2];

    double h = dh;
    double k = dk;
    double hk = h * k;
    double bvn = 0.0;

    if (std::abs(r) < 0.925) {
        const double hs = (h * h + k * k) / 2.0;
        const double asr = std::asin(r);
        for (int i = 0; i < rule.n; ++i) {
            for (double sign : {-1.0, 1.0}) {
                const double sn = std::sin(asr * (1.0 + sign * rule.x[static_cast<std::size_t>(i)]) / 2.0);
                bvn += rule.w[static_cast<std::size_t>(i)] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        return bvn * asr / (2.0 * two_pi) + normal_cdf(-h) * normal_cdf(-k);
    }

    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    if (std::abs(r) < 1.0) {
        const double as = (1.0 - r) * (1.0 + r);
        double a = std::sqrt(as);
        const double bs = (h - k) * (h - k);
        const double c = (4.0 - hk) / 8.0;
        const double d = (12.0 - hk) / 16.0;
        bvn = a * std::exp(-(bs / as + hk) / 2.0) *
              (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
        if (hk > -160.0) {
            const double b = std::sqrt(bs);
            bvn -= std::exp(-hk / 2.0) * std::sqrt(two_pi) * normal_cdf(-b / a) * b *
                   (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (int i = 0; i < rule.n; ++i) {
            for (double sign : {-1.0, 1.0}) {
                const double xs0 = a * (sign * rule.x[static_cast<std::size_t>(i)] + 1.0);
                const double xs = xs0 * xs0;
                const double rs = std::sqrt(1.0 - xs);
                bvn += a * rule.w[static_cast<std::size_t>(i)] *
                       (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
                        std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
            }
        }
        bvn = -bvn / two_pi;
    }
    if (r > 0.0) return bvn + normal_cdf(-std::max(h, k));
    bvn = -bvn;
    if (k > h) bvn += normal_cdf(k) - normal_cdf(h);
    return bvn;
}

}  // namespace detail

/// P(X <= a, Y <= b) for a standard bivariate normal pair with correlation rho.
/// Infinite limits are accepted.
inline double bivariate_normal_cdf(double a, double b, double rho) {
    if (std::isinf(a) && a < 0.0) return 0.0;
    if (std::isinf(b) && b < 0.0) return 0.0;
    if (std::isinf(a)) return normal_cdf(b);
    if (std::isinf(b)) return normal_cdf(a);
    if (rho >= 1.0) return normal_cdf(std::min(a, b));
    if (rho <= -1.0) return std::max(0.0, normal_cdf(a) - normal_cdf(-b));
    const double p = detail::bvn_upper(-a, -b, rho);
    return std::clamp(p, 0.0, 1.0);
}

/// P(a1 < X <= b1, a2 < Y <= b2) for the standard bivariate normal.
inline double bivariate_normal_rectangle(double a1, double b1, double a2, double b2, double rho) {
    const double v = bivariate_normal_cdf(b1, b2, rho) - bivariate_normal_cdf(a1, b2, rho) -
                     bivariate_normal_cdf(b1, a2, rho) + bivariate_normal_cdf(a1, a2, rho);
    return std::max(0.0, v);
}

}  // namespace tarlev::core
