#pragma once

#include <stdexcept>
#include <string>

namespace torus_planes {

enum class ErrorCode {
    DegeneratePoint,
    SingularMatrix,
    CoincidentPoints,
    IdentityMap,
    ParallelInput,
    NoBranch,
    AmbiguousBranch,
    EqualCircles,
    PreconditionViolated,
    NotFound,
    PointOnBaseCross,
    FamilyMismatch,
    UnsupportedPlane,
    InvalidHomeomorphism,
    ParseError,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DegeneratePoint: return "DegeneratePoint";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::CoincidentPoints: return "CoincidentPoints";
        case ErrorCode::IdentityMap: return "IdentityMap";
        case ErrorCode::ParallelInput: return "ParallelInput";
        case ErrorCode::NoBranch: return "NoBranch";
        case ErrorCode::AmbiguousBranch: return "AmbiguousBranch";
        case ErrorCode::EqualCircles: return "EqualCircles";
        case ErrorCode::PreconditionViolated: return "PreconditionViolated";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::PointOnBaseCross: return "PointOnBaseCross";
        case ErrorCode::FamilyMismatch: return "FamilyMismatch";
        case ErrorCode::UnsupportedPlane: return "UnsupportedPlane";
        case ErrorCode::InvalidHomeomorphism: return "InvalidHomeomorphism";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class GeometryError : public std::runtime_error {
public:
    GeometryError(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace torus_planes
