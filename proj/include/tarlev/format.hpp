#pragma once

#include <cstdio>
#include <string>

namespace tarlev {

/// Shortest text that round-trips a double is not guaranteed by %g; 17 significant digits is.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace tarlev
