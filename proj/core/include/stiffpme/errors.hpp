#pragma once

#include <stdexcept>
#include <string>

#include "stiffpme/vec.hpp"

namespace stiffpme {

/// Caller supplied something outside an operation's contract.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A point query fell outside the grid extent.
class OutOfDomain : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// A simulation produced non-finite values, or its support reached the boundary margin.
class NumericalAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solve hit its cap without reaching the requested tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A streamline left the configured bounding box. Carries the last in-bounds state.
class EscapeError : public std::runtime_error {
public:
    EscapeError(const std::string& what, Vec2 last_position, double last_time)
        : std::runtime_error(what), last_position_(last_position), last_time_(last_time) {}
    Vec2 last_position() const noexcept { return last_position_; }
    double last_time() const noexcept { return last_time_; }

private:
    Vec2 last_position_;
    double last_time_;
};

}  // namespace stiffpme
