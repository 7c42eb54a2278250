#pragma once

#include <stdexcept>
#include <string>

namespace cyclemix {

enum class ErrorKind {
    InvalidParameter,
    DegenerateModel,
    WrongModel,
    EmptyEdgeSet,
    NotEquidistant,
    NotDivisible,
    InfeasibleParams,
    PreconditionViolated,
    OverlappingSets,
    EmptyOrFullSet,
    TooLarge,
    DisconnectedChain,
    NoEmptyArc,
    NotConverged,
    LengthMismatch,
    NonpositivePhi,
    DegeneratePoints,
    EmptyInput,
    IoError,
    ConfigError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Usage/config mistakes map to exit code 2, runtime computation failures to 3.
    bool is_usage_error() const noexcept {
        switch (kind_) {
            case ErrorKind::InvalidParameter:
            case ErrorKind::DegenerateModel:
            case ErrorKind::WrongModel:
            case ErrorKind::IoError:
            case ErrorKind::ConfigError:
                return true;
            default:
                return false;
        }
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace cyclemix
