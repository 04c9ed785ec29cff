#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace mlpr {

/// Shortest decimal representation that parses back to exactly v.
inline std::string format_number(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace mlpr
