#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>

namespace tarlev::stats {

inline double f_upper_tail(double f, double df1, double df2) {
    if (!(f > 0.0)) return 1.0;
    if (!std::isfinite(f)) return 0.0;
    return boost::math::cdf(boost::math::complement(boost::math::fisher_f(df1, df2), f));
}

inline double chi2_upper_tail(double x, double df) {
    if (!(x > 0.0)) return 1.0;
    if (!std::isfinite(x)) return 0.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

/// Two-sided p-value of a t statistic.
inline double t_two_sided(double t, double df) {
    if (!std::isfinite(t)) return 0.0;
    return 2.0 * boost::math::cdf(boost::math::complement(boost::math::students_t(df), std::abs(t)));
}

inline double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

}  // namespace tarlev::stats
