#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cyclesynth {

enum class ErrorCode {
    PolicyIncomplete,
    EmptyTarget,
    DimensionMismatch,
    NumericalFailure,
    NotStochastic,
    NotTransient,
    ImproperPolicy,
    NotCommunicating,
    NonConvergence,
    NoInitialPolicy,
    TooLarge,
    ParseError,
    InvariantViolation,
    InvalidRun,
    AlphabetMismatch,
    PiUnused,
    UntrackedState,
    NotReachableAlmostSurely,
    NoReachableAmec,
    InvalidArgument,
};

std::string_view errorCodeName(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(errorCodeName(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace cyclesynth
