#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pressure_lab {

enum class ErrorCode {
    InvalidArgument,
    ParseError,
    NonIrreducible,
    NoConvergence,
    SupportMismatch,
    NumericalOverflow,
    DegenerateSplitting,
    MissingDirection,
    DegenerateMap,
    InvalidEntropy,
    OrderingViolated,
    RationalAlpha,
    TruncationTooCoarse,
    CurveNotConvex,
    MalformedCurve,
    UnknownMap,
    UnknownClaim,
    UnknownScenario,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by bad input rather than a numerical breakdown.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace pressure_lab
