#pragma once

// Deterministic float formatting for emitted JSON: values are quantized to 12
// significant digits before storage so identical runs are byte-identical.

#include <cmath>
#include <cstdio>

#include "json.hpp"

namespace heis {

inline nlohmann::json json_num(double x) {
    if (!std::isfinite(x)) return nullptr;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return nlohmann::json::parse(buf);
}

}  // namespace heis
