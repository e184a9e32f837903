#pragma once

#include <stdexcept>
#include <string>

namespace jumpflow {

/// Thrown when an argument violates a documented precondition (p < 1, t < 0, ...).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an iteration budget is exhausted; carries the last residual.
class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, double residual)
        : std::runtime_error(what + " (last residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Thrown when a caller breaks a structural contract (e.g. non-nested noise
/// windows handed to the backward-coupling routines).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace jumpflow
