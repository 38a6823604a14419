#pragma once

#include <stdexcept>
#include <string>

namespace monolayer {

// File could not be opened / read / written at the OS level.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// File opened fine but its bytes do not form a valid instance of the format.
struct format_error : std::runtime_error {
    explicit format_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Valid file, but a feature this library does not handle (16-bit PNG, ...).
struct unsupported_error : std::runtime_error {
    explicit unsupported_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace monolayer
