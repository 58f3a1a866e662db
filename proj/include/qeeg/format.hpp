#pragma once

#include <charconv>
#include <optional>
#include <string>

namespace qeeg {

/// Shortest round-trip decimal form.
inline void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

inline std::string format_double(double v) {
    std::string out;
    append_double(out, v);
    return out;
}

/// Empty field when undefined.
inline std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace qeeg
