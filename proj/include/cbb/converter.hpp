#pragma once

#include <string>

#include "cbb/errors.hpp"

namespace cbb {

/// Plant constants of the converter power stage.
struct CircuitParams {
    double v_in;    ///< input voltage [V]
    double l;       ///< inductance [H]
    double c;       ///< output capacitance [F]
    double r_l;     ///< inductor ESR [ohm]
    double r_c;     ///< capacitor ESR [ohm]
    double f_sw;    ///< switching frequency [Hz]
    double p_load;  ///< lamp power at the operating point [W]

    /// Shipped defaults: the 18 W ballast stage (310 V input, 40 kHz,
    /// 15 mH / 1 uF with 100 mOhm / 50 mOhm parasitics).
    static CircuitParams defaults() {
        return {310.0, 15e-3, 1e-6, 0.1, 0.05, 40e3, 18.0};
    }

    /// Throws DomainError when any field is non-positive or f_sw < 1 kHz.
    void validate() const;
};

/// Operating mode. The dual-PWM buck-boost mode and the inactive-input state
/// are intentionally unrepresentable.
enum class Mode { Buck, Boost };

const char* to_string(Mode m);

/// Instantaneous gate state of the two active switches.
struct SwitchState {
    bool sw1 = false;
    bool sw2 = false;
};

/// Steady-state operating point of the converter.
struct OperatingPoint {
    Mode mode;
    double v_out;    ///< regulated output voltage [V]
    double duty;     ///< steady duty ratio of the PWM-driven switch, in (0,1)
    double r_load;   ///< load resistance [ohm]
    double i_out;    ///< load current [A]
    double i_l_avg;  ///< average inductor current [A]
};

/// Fixed-resistance load model for a lamp regulated at v_out: R = V^2 / P.
double load_resistance(double v_out, double p_load);

/// Designs the steady-state operating point for a target output voltage.
///
/// Targets above the input select boost mode with duty 1 - v_in/v_target;
/// targets below select buck mode with duty v_target/v_in. Targets within
/// +/- deadband_frac of v_in are rejected: regulating there would need the
/// lossy dual-PWM buck-boost mode, which this converter avoids.
OperatingPoint operating_point(const CircuitParams& params, double v_target,
                               double deadband_frac = 0.01);

/// Same design math with an explicit load resistance instead of the params'
/// lamp power (used for load sweeps and randomized analysis points).
OperatingPoint operating_point_for_load(const CircuitParams& params,
                                        double v_target, double r_load,
                                        double deadband_frac = 0.01);

/// Peak-to-peak inductor current ripple over one switching period:
/// (V_in - V_0)/L * T_on in buck mode, V_in/L * T_on in boost mode.
double inductor_ripple(const CircuitParams& params, const OperatingPoint& op);

enum class ConductionMode { Ccm, Boundary, Dcm };

const char* to_string(ConductionMode m);

/// CCM classification with its margin i_l_avg - ripple/2. Margins within 1%
/// of the average inductor current classify as Boundary.
struct ConductionReport {
    ConductionMode mode;
    double margin;  ///< amperes; positive means the valley current stays > 0
};

ConductionReport ccm_check(const CircuitParams& params,
                           const OperatingPoint& op);

}  // namespace cbb
