#pragma once

#include <stdexcept>
#include <string>

namespace evap {

/// Configuration / input validation failure (CLI exit code 1).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Nonlinear or linear solver failure (CLI exit code 2).
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// A runtime invariant monitor tripped (CLI exit code 3).
struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evap
