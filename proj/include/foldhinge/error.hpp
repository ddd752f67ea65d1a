#pragma once

#include <stdexcept>
#include <string>

namespace foldhinge {

enum class ErrorKind {
    InvalidArgument,
    InvalidGeometry,
    OutOfRange,
    DomainError,
    SingularConfiguration,
    InsufficientData,
    DegenerateModel,
    NonConvergence,
    StepBudgetExceeded,
    MalformedInput,
    ConfigError,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::InvalidGeometry: return "invalid geometry";
    case ErrorKind::OutOfRange: return "out of range";
    case ErrorKind::DomainError: return "domain error";
    case ErrorKind::SingularConfiguration: return "singular configuration";
    case ErrorKind::InsufficientData: return "insufficient data";
    case ErrorKind::DegenerateModel: return "degenerate model";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::StepBudgetExceeded: return "step budget exceeded";
    case ErrorKind::MalformedInput: return "malformed input";
    case ErrorKind::ConfigError: return "config error";
    }
    return "unknown error";
}

/// Every failure raised by the library carries a kind so front ends can map
/// it to a stable exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace foldhinge
