#pragma once

#include <stdexcept>
#include <string>

namespace chemolab {

enum class ErrorKind {
    InvalidDomain,
    InvalidInitialData,
    InvalidExponent,
    InvalidParameters,
    InvalidKind,
    DegenerateData,
    WrongBranch,
    OutOfRegime,
    InsufficientData,
    SolverFailure,
    NumericalFailure,
    ConfigError,
    InternalError,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidDomain: return "invalid-domain";
        case ErrorKind::InvalidInitialData: return "invalid-initial-data";
        case ErrorKind::InvalidExponent: return "invalid-exponent";
        case ErrorKind::InvalidParameters: return "invalid-parameters";
        case ErrorKind::InvalidKind: return "invalid-kind";
        case ErrorKind::DegenerateData: return "degenerate-data";
        case ErrorKind::WrongBranch: return "wrong-branch";
        case ErrorKind::OutOfRegime: return "out-of-regime";
        case ErrorKind::InsufficientData: return "insufficient-data";
        case ErrorKind::SolverFailure: return "solver-failure";
        case ErrorKind::NumericalFailure: return "numerical-failure";
        case ErrorKind::ConfigError: return "config-error";
        case ErrorKind::InternalError: return "internal-error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace chemolab
