#include "cyclesynth/error.hpp"

namespace cyclesynth {

std::string_view errorCodeName(ErrorCode code) {
    switch (code) {
        case ErrorCode::PolicyIncomplete: return "PolicyIncomplete";
        case ErrorCode::EmptyTarget: return "EmptyTarget";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::NotStochastic: return "NotStochastic";
        case ErrorCode::NotTransient: return "NotTransient";
        case ErrorCode::ImproperPolicy: return "ImproperPolicy";
        case ErrorCode::NotCommunicating: return "NotCommunicating";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::NoInitialPolicy: return "NoInitialPolicy";
        case ErrorCode::TooLarge: return "TooLarge";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
        case ErrorCode::InvalidRun: return "InvalidRun";
        case ErrorCode::AlphabetMismatch: return "AlphabetMismatch";
        case ErrorCode::PiUnused: return "PiUnused";
        case ErrorCode::UntrackedState: return "UntrackedState";
        case ErrorCode::NotReachableAlmostSurely: return "NotReachableAlmostSurely";
        case ErrorCode::NoReachableAmec: return "NoReachableAmec";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

}  // namespace cyclesynth
