#pragma once

#include <charconv>
#include <string>

namespace vad::detail {

/// Shortest decimal text that parses back to exactly the same value.
inline std::string format_float(float v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace vad::detail
