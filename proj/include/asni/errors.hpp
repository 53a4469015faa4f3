#pragma once

#include <stdexcept>
#include <string>

namespace asni {

// Incompatible tensor/layer geometry.
struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad experiment configuration or preset.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dataset file problems, with a machine-checkable kind.
struct DataError : std::runtime_error {
    enum class Kind { io, bad_magic, truncated, count_mismatch, bad_value };

    DataError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}

    Kind kind;
};

// Non-finite losses, corrupt checkpoints and the like.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace asni
