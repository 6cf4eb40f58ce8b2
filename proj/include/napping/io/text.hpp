#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace napping {

// Shortest round-trip formatting; parse(format(x)) == x bit-exactly.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
    return {buf, end};
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw std::runtime_error("bad numeric field: " + s);
    }
    return v;
}

} // namespace napping
