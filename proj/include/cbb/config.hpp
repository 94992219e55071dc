#pragma once

#include <iosfwd>
#include <string>

#include "cbb/control_loop.hpp"
#include "cbb/converter.hpp"
#include "cbb/sim.hpp"

namespace cbb {

/// Flat key = value run configuration: all tunables of the tool in one
/// structure, with defaults matching the shipped 18 W ballast design.
///
/// The file format is one `key = value` entry per line, `#` comments, SI
/// units throughout, scientific notation accepted. Unknown keys are
/// rejected.
struct RunConfig {
    CircuitParams circuit = CircuitParams::defaults();
    TypeIiiController controller = TypeIiiController::defaults();
    LoopConfig loop;
    PwmConfig pwm;  // f_sw is mirrored from circuit.f_sw, see pwm_config()
    SimConfig sim;
    PerformanceGoals goals;

    double v_ref_boost = 400.0;
    double v_ref_buck = 280.0;
    double deadband_frac = 0.01;
    double margin_f_lo = 1.0;
    double margin_f_hi = 1e6;

    /// PWM configuration with the switching frequency filled in.
    PwmConfig pwm_config() const {
        PwmConfig p = pwm;
        p.f_sw = circuit.f_sw;
        return p;
    }

    /// Assigns one key from its textual value. Throws DomainError for
    /// unknown keys or unparseable values.
    void set(const std::string& key, const std::string& value);

    /// Applies a `key=value` override string (the CLI --set argument).
    void set_override(const std::string& assignment);

    /// Re-validates every module invariant.
    void validate() const;

    /// Full-precision dump; re-ingesting reproduces this config exactly.
    void dump(std::ostream& out) const;

    static RunConfig parse(std::istream& in);
    static RunConfig parse_file(const std::string& path);
};

}  // namespace cbb
