#include "cbb/converter.hpp"

#include <cmath>

namespace cbb {

void CircuitParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw DomainError(std::string("circuit parameter ") + name +
                              " must be strictly positive");
        }
    };
    positive(v_in, "v_in");
    positive(l, "l");
    positive(c, "c");
    positive(r_l, "r_l");
    positive(r_c, "r_c");
    positive(f_sw, "f_sw");
    positive(p_load, "p_load");
    if (f_sw < 1e3) {
        throw DomainError("switching frequency below the 1 kHz sanity bound");
    }
}

const char* to_string(Mode m) {
    return m == Mode::Buck ? "buck" : "boost";
}

const char* to_string(ConductionMode m) {
    switch (m) {
        case ConductionMode::Ccm: return "CCM";
        case ConductionMode::Boundary: return "Boundary";
        case ConductionMode::Dcm: return "DCM";
    }
    return "?";
}

double load_resistance(double v_out, double p_load) {
    if (!(v_out > 0.0)) throw DomainError("load_resistance: v_out must be > 0");
    if (!(p_load > 0.0)) throw DomainError("load_resistance: p_load must be > 0");
    return v_out * v_out / p_load;
}

OperatingPoint operating_point_for_load(const CircuitParams& params,
                                        double v_target, double r_load,
                                        double deadband_frac) {
    params.validate();
    if (!(v_target > 0.0)) {
        throw DomainError("operating_point: target voltage must be > 0");
    }
    if (!(r_load > 0.0)) {
        throw DomainError("operating_point: load resistance must be > 0");
    }
    if (std::abs(v_target - params.v_in) <= deadband_frac * params.v_in) {
        throw ModeError(
            "target voltage within the dead-band around the input voltage: "
            "regulating here would require the avoided dual-PWM buck-boost "
            "mode");
    }

    OperatingPoint op;
    op.v_out = v_target;
    op.r_load = r_load;
    op.i_out = v_target / r_load;
    if (v_target > params.v_in) {
        op.mode = Mode::Boost;
        op.duty = 1.0 - params.v_in / v_target;
        op.i_l_avg = op.i_out / (1.0 - op.duty);
    } else {
        op.mode = Mode::Buck;
        op.duty = v_target / params.v_in;
        op.i_l_avg = op.i_out;
    }
    return op;
}

OperatingPoint operating_point(const CircuitParams& params, double v_target,
                               double deadband_frac) {
    return operating_point_for_load(
        params, v_target, load_resistance(v_target, params.p_load),
        deadband_frac);
}

double inductor_ripple(const CircuitParams& params, const OperatingPoint& op) {
    const double t_on = op.duty / params.f_sw;
    if (op.mode == Mode::Buck) {
        return (params.v_in - op.v_out) / params.l * t_on;
    }
    return params.v_in / params.l * t_on;
}

ConductionReport ccm_check(const CircuitParams& params,
                           const OperatingPoint& op) {
    const double half_ripple = 0.5 * inductor_ripple(params, op);
    const double margin = op.i_l_avg - half_ripple;
    ConductionMode mode;
    if (std::abs(margin) < 0.01 * op.i_l_avg) {
        mode = ConductionMode::Boundary;
    } else if (margin > 0.0) {
        mode = ConductionMode::Ccm;
    } else {
        mode = ConductionMode::Dcm;
    }
    return {mode, margin};
}

}  // namespace cbb
