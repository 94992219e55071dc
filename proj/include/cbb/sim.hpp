#pragma once

#include <functional>
#include <vector>

#include "cbb/control_loop.hpp"
#include "cbb/small_signal.hpp"
#include "cbb/trace.hpp"

namespace cbb {

/// Band-split modulator: one triangular carrier per band, a single control
/// signal. Control values in [v_l1, v_h1] PWM switch 1 with switch 2 held
/// off (buck); values in (v_h1, v_h2] hold switch 1 on and PWM switch 2
/// (boost). The dual-PWM band does not exist by construction.
struct PwmConfig {
    double f_sw = 40e3;
    double v_l1 = 0.0;
    double v_h1 = 1.0;
    double v_h2 = 2.0;

    /// Commanded-duty ceiling for the boost switch (minimum off-time
    /// emulation). A sustained duty of exactly 1 transfers no energy to the
    /// output and the feedback loop latches, so closed-loop runs clamp the
    /// control signal below that point.
    double boost_duty_max = 0.98;

    void validate() const;
};

struct PwmResult {
    SwitchState sw;
    Mode mode;
};

/// Gate states at time t. v_ctrl is expected pre-clamped to [v_l1, v_h2];
/// out-of-range values are clamped here as well.
PwmResult pwm_states(const PwmConfig& cfg, double v_ctrl, double t);

/// Band selection / continuous duty mapping used by the averaged model.
Mode band_mode(const PwmConfig& cfg, double v_ctrl);
double band_duty(const PwmConfig& cfg, double v_ctrl);

/// Fixed-step integration setup. Zeros mean "derive from context": dt
/// defaults to T_sw/500 (switched) and dt_averaged to T_sw/10; t_end and
/// step_at default per scenario.
struct SimConfig {
    double dt = 0.0;
    double dt_averaged = 0.0;
    double t_end = 0.0;
    double step_at = 0.0;
    bool diode_clamp = true;
    bool anti_windup = true;
};

double effective_dt(const SimConfig& sim, double f_sw, bool switched);

/// Piecewise-constant reference and load-resistance schedule. Segments must
/// be sorted by t_start with the first at t = 0.
struct ReferenceSegment {
    double t_start;
    double v_ref;
    double r_load;
};
using ReferenceProfile = std::vector<ReferenceSegment>;

/// Initial conditions of a closed-loop run: plant state plus the three
/// compensator states (integrator and the two biquad states).
struct ClosedLoopInit {
    AveragedState plant{0.0, 0.0};
    double integrator = 0.0;
    double biquad1 = 0.0;
    double biquad2 = 0.0;
};

/// Steady operating state for a constant reference: bisects the static
/// control-to-output characteristic of the modulator bands, then solves the
/// averaged equilibrium at the resulting duty.
ClosedLoopInit closed_loop_equilibrium(const CircuitParams& params,
                                       const TypeIiiController& k,
                                       const LoopConfig& lcfg,
                                       const PwmConfig& pwm, double v_ref,
                                       double r_load);

/// Closed-loop switched-topology simulation: RK4 on the plant states with
/// gate states sampled at stage times (no event detection), the compensator
/// integrated as a continuous 3-state system alongside, conditional-
/// integration anti-windup at the control clamp, and diode emulation that
/// holds the inductor current at zero when every conduction path is blocked.
SimTrace simulate_switched(const CircuitParams& params,
                           const TypeIiiController& k, const LoopConfig& lcfg,
                           const PwmConfig& pwm, const SimConfig& sim,
                           const ReferenceProfile& profile,
                           const ClosedLoopInit& init = {});

/// Closed-loop nonlinear averaged simulation: same contract minus switching
/// ripple, with the mode and duty taken per stage from the control-signal
/// band.
SimTrace simulate_averaged(const CircuitParams& params,
                           const TypeIiiController& k, const LoopConfig& lcfg,
                           const PwmConfig& pwm, const SimConfig& sim,
                           const ReferenceProfile& profile,
                           const ClosedLoopInit& init = {});

/// Open-loop switched run at a fixed control signal.
SimTrace simulate_switched_fixed_ctrl(const CircuitParams& params,
                                      const PwmConfig& pwm,
                                      const SimConfig& sim, double v_ctrl,
                                      double r_load, double t_end,
                                      const AveragedState& init = {});

/// Open-loop averaged run with an externally scheduled duty (fixed mode).
SimTrace simulate_averaged_fixed_duty(const CircuitParams& params, Mode mode,
                                      const SimConfig& sim,
                                      const std::function<double(double)>& duty,
                                      double r_load, double t_end,
                                      const AveragedState& init = {});

/// A ready-to-run reference-step experiment.
struct ScenarioSpec {
    ReferenceProfile profile;
    ClosedLoopInit init;
    std::vector<double> step_times;
    double t_end;
};

/// Single-mode step: start at the closed-loop equilibrium for v_from and
/// step the reference to v_to. v_from = 0 selects the default start (the
/// input voltage for boost, 90% of the target for buck). The load is the
/// target point's lamp resistance for the whole run.
ScenarioSpec single_mode_step_scenario(const CircuitParams& params,
                                       const TypeIiiController& k,
                                       const LoopConfig& lcfg,
                                       const PwmConfig& pwm,
                                       const SimConfig& sim, Mode mode,
                                       double v_to, double v_from = 0.0);

/// Lamp start-up sequence: hold at the pass-through pre-charge point, step
/// to the ignition voltage (boost), then step down to the run voltage
/// (buck). The load follows the reference segment (R = V_ref^2 / P).
ScenarioSpec ignition_scenario(const CircuitParams& params,
                               const TypeIiiController& k,
                               const LoopConfig& lcfg, const PwmConfig& pwm,
                               const SimConfig& sim, double v_boost,
                               double v_buck);

}  // namespace cbb
