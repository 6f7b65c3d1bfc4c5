// Fixed-decimal formatting used by every file writer: output bytes must not
// depend on locale or stream state.
#pragma once

#include <cstdio>
#include <string>

namespace locfuse::detail {

inline std::string fmt_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

}  // namespace locfuse::detail
