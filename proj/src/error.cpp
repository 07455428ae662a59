#include "tradegame/error.hpp"

namespace tradegame {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::CycleDetected: return "CycleDetected";
        case ErrorCode::NegativeWeight: return "NegativeWeight";
        case ErrorCode::WeightOutOfRange: return "WeightOutOfRange";
        case ErrorCode::InvalidNetwork: return "InvalidNetwork";
        case ErrorCode::UnknownBuiltin: return "UnknownBuiltin";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DegenerateNode: return "DegenerateNode";
        case ErrorCode::StaleProbability: return "StaleProbability";
        case ErrorCode::KernelOutOfRange: return "KernelOutOfRange";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::UnknownParameter: return "UnknownParameter";
        case ErrorCode::NotConverged: return "NotConverged";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace tradegame
