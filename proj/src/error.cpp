#include "pressure_lab/error.hpp"

namespace pressure_lab {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NonIrreducible: return "NonIrreducible";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::SupportMismatch: return "SupportMismatch";
        case ErrorCode::NumericalOverflow: return "NumericalOverflow";
        case ErrorCode::DegenerateSplitting: return "DegenerateSplitting";
        case ErrorCode::MissingDirection: return "MissingDirection";
        case ErrorCode::DegenerateMap: return "DegenerateMap";
        case ErrorCode::InvalidEntropy: return "InvalidEntropy";
        case ErrorCode::OrderingViolated: return "OrderingViolated";
        case ErrorCode::RationalAlpha: return "RationalAlpha";
        case ErrorCode::TruncationTooCoarse: return "TruncationTooCoarse";
        case ErrorCode::CurveNotConvex: return "CurveNotConvex";
        case ErrorCode::MalformedCurve: return "MalformedCurve";
        case ErrorCode::UnknownMap: return "UnknownMap";
        case ErrorCode::UnknownClaim: return "UnknownClaim";
        case ErrorCode::UnknownScenario: return "UnknownScenario";
    }
    return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NoConvergence:
        case ErrorCode::NumericalOverflow:
        case ErrorCode::DegenerateSplitting:
        case ErrorCode::CurveNotConvex:
        case ErrorCode::TruncationTooCoarse:
            return false;
        default:
            return true;
    }
}

}  // namespace pressure_lab
