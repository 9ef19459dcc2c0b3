#pragma once

#include <stdexcept>
#include <string>

namespace tracelab {

/// Input violates an operation's precondition (overlapping sets, bad parameters, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed edge-list or configuration text.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operation needs a connected graph (resistances, hitting times).
class DisconnectedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Random graph sampler ran out of restarts.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative solver stopped before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double best_residual)
        : std::runtime_error(what), best_residual_(best_residual) {}

    double best_residual() const noexcept { return best_residual_; }

private:
    double best_residual_;
};

}  // namespace tracelab
