#pragma once

#include <charconv>
#include <string>

namespace util {

// Shortest decimal text that parses back to the same double. -0 prints as 0.
inline std::string format_number(double value)
{
    if (value == 0.0) return "0";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

}  // namespace util
