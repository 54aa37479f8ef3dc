#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace probin {

enum class ErrorCode {
    InvalidMesh,
    InvalidParameter,
    MeshFoldover,
    ConstraintViolation,
    DegenerateInput,
    UnsupportedProblem,
    UnsupportedExponent,
    NoConvergence,
    LinearizationNotInvertible,
    NoDescentDirection,
    InsufficientData,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library; `code()` is the
/// machine-readable tag written into run manifests.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace probin
