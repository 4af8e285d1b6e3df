#pragma once

#include <charconv>
#include <string>
#include <system_error>

namespace eitshape {

// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double value) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

}  // namespace eitshape
