#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kelly
{

enum class ErrorCode
{
    InvalidParameter,
    CalibrationInfeasible,
    DomainViolation,
    NoInteriorMaximum,
    NewtonStall,
    SingularCovariance,
    DegenerateNormalization,
    InvalidJoint,
    InfeasibleLeverage,
    SeriesTooShort,
    ParseError,
    EmptyFile,
    IoError
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. `line()` is set only for
/// ParseError (1-based line of the offending input).
class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string& message, std::size_t line = 0)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), line_(line)
    {
    }

    ErrorCode code() const noexcept { return code_; }
    std::size_t line() const noexcept { return line_; }

private:
    ErrorCode code_;
    std::size_t line_;
};

inline std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidParameter: return "INVALID_PARAMETER";
    case ErrorCode::CalibrationInfeasible: return "CALIBRATION_INFEASIBLE";
    case ErrorCode::DomainViolation: return "DOMAIN_VIOLATION";
    case ErrorCode::NoInteriorMaximum: return "NO_INTERIOR_MAXIMUM";
    case ErrorCode::NewtonStall: return "NEWTON_STALL";
    case ErrorCode::SingularCovariance: return "SINGULAR_COVARIANCE";
    case ErrorCode::DegenerateNormalization: return "DEGENERATE_NORMALIZATION";
    case ErrorCode::InvalidJoint: return "INVALID_JOINT";
    case ErrorCode::InfeasibleLeverage: return "INFEASIBLE_LEVERAGE";
    case ErrorCode::SeriesTooShort: return "SERIES_TOO_SHORT";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::EmptyFile: return "EMPTY_FILE";
    case ErrorCode::IoError: return "IO_ERROR";
    }
    return "UNKNOWN";
}

} // namespace kelly
