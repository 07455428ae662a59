#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tradegame {

enum class ErrorCode {
    CycleDetected,
    NegativeWeight,
    WeightOutOfRange,
    InvalidNetwork,
    UnknownBuiltin,
    IndexOutOfRange,
    DimensionMismatch,
    DegenerateNode,
    StaleProbability,
    KernelOutOfRange,
    TooLarge,
    ConfigInvalid,
    UnknownParameter,
    NotConverged,
    Internal,
};

std::string_view to_string(ErrorCode code);

/// Domain error carrying a machine-readable code. Every failure the library
/// reports to callers goes through this type.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace tradegame
