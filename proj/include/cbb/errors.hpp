#pragma once

#include <stdexcept>
#include <string>

namespace cbb {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid numeric input (non-positive parameter, value out of range).
struct DomainError : Error {
    using Error::Error;
};

/// Wrong or forbidden converter mode for the requested operation.
struct ModeError : Error {
    using Error::Error;
};

/// Transfer-function evaluation landed on a denominator root.
struct PoleError : Error {
    explicit PoleError(double omega_rad_s)
        : Error("transfer function evaluated at a pole, omega = " +
                std::to_string(omega_rad_s) + " rad/s"),
          omega(omega_rad_s) {}
    double omega;
};

/// Polynomial degree exceeds the supported bound.
struct DegreeError : Error {
    using Error::Error;
};

/// Iterative solver failed to converge.
struct ConvergenceError : Error {
    using Error::Error;
};

/// Simulation produced a non-finite state.
struct DivergenceError : Error {
    explicit DivergenceError(double t_seconds)
        : Error("simulation state became non-finite at t = " +
                std::to_string(t_seconds) + " s"),
          t(t_seconds) {}
    double t;
};

/// Step-metric extraction: the trace never settled into the tolerance band.
struct SettlingError : Error {
    using Error::Error;
};

}  // namespace cbb
