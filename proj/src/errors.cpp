#include "probin/errors.hpp"

namespace probin {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidMesh: return "InvalidMesh";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::MeshFoldover: return "MeshFoldover";
        case ErrorCode::ConstraintViolation: return "ConstraintViolation";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::UnsupportedProblem: return "UnsupportedProblem";
        case ErrorCode::UnsupportedExponent: return "UnsupportedExponent";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::LinearizationNotInvertible: return "LinearizationNotInvertible";
        case ErrorCode::NoDescentDirection: return "NoDescentDirection";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace probin
