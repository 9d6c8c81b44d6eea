#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <system_error>

namespace crn {

/// Shortest decimal form that round-trips to the same double ("1", "0.25",
/// "6.283185307179586e-05"). Deterministic, locale-independent.
inline std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

/// Parses a complete double; returns false on trailing garbage or overflow.
inline bool parse_double(std::string_view text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace crn
