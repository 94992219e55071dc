#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "cbb/trace.hpp"
#include "cbb/transfer_function.hpp"

namespace cbb {

/// Type-III compensator
///   K(s) = (a1 s^2 + a2 s + a3) / (s (b1 s^2 + b2 s + b3))
/// one pole at the origin, two zeros, two extra high-frequency poles.
struct TypeIiiController {
    double a1, a2, a3;
    double b1, b2, b3;

    /// Coefficients the tool ships with, tuned against the boost stage of
    /// the default 18 W design.
    static TypeIiiController defaults() {
        return {1.9e-6, 0.012915, 80.0, 6.8e-12, 3.0e-6, 1.5};
    }

    /// Throws DomainError unless b1 > 0, b3 > 0 and a3 > 0.
    void validate() const;
};

/// Gains and limits of the feedback loop around the power stage.
struct LoopConfig {
    double sensor_gain = 1.0;     ///< output-voltage feedback gain
    double modulator_gain = 1.0;  ///< control volts -> modulator input
    double vctrl_min = 0.0;       ///< lower control-signal clamp
    double vctrl_max = 2.0;       ///< upper control-signal clamp

    void validate() const;
};

/// Gain/phase margin report. Fields are empty when the corresponding
/// crossover does not occur inside the searched band.
struct MarginReport {
    std::optional<double> gain_margin_db;
    std::optional<double> phase_margin_deg;
    std::optional<double> gain_crossover_hz;
    std::optional<double> phase_crossover_hz;
};

/// Step-response targets the closed loop has to meet.
struct PerformanceGoals {
    double rise_time_max = 0.1e-3;
    double settling_time_max = 0.25e-3;
    double steady_state_error_max = 1e-3;
    double overshoot_max = 0.15;
};

/// K(s) as a rational transfer function, degree (2, 3).
TransferFunction type_iii_tf(const TypeIiiController& k);

/// Loop gain sensor * modulator * K(s) * plant (series, no cancellation).
TransferFunction loop_gain(const TransferFunction& plant,
                           const TypeIiiController& k, const LoopConfig& cfg);

/// Reference-to-output closure: with sensor gain in the feedback path the
/// DC tracking is exact whenever sensor_gain = 1 and the loop has integral
/// action.
TransferFunction closed_loop(const TransferFunction& plant,
                             const TypeIiiController& k,
                             const LoopConfig& cfg);

/// Crossover search on a log grid (default 400 points) with sign-change
/// bracketing and log-bisection refinement to 1e-6 relative; phase is
/// unwrapped along the grid. Margins are taken at the first crossover of
/// each kind inside [f_lo, f_hi].
MarginReport margins(const TransferFunction& loop, double f_lo, double f_hi,
                     int grid_points = 400);

/// Pole-based stability: stable iff every denominator root has real part
/// below -1e-6 rad/s (the epsilon absorbs root-finder noise).
struct StabilityReport {
    bool stable;
    std::vector<std::complex<double>> poles;
};
StabilityReport stability_check(const TransferFunction& tf);

/// Element-wise comparison of measured step metrics against the goals.
/// The steady-state-error check widens by the measured output ripple for
/// switched traces (metrics.ripple_fraction is zero for averaged ones).
struct GateReport {
    bool rise_time_ok;
    bool settling_time_ok;
    bool overshoot_ok;
    bool steady_state_error_ok;
    bool overall;
};
GateReport goal_gate(const StepMetrics& metrics, const PerformanceGoals& goals);

}  // namespace cbb
