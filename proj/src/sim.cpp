#include "cbb/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cbb {

void PwmConfig::validate() const {
    if (!(f_sw > 0.0)) throw DomainError("pwm: f_sw must be > 0");
    if (!(v_l1 < v_h1 && v_h1 < v_h2)) {
        throw DomainError("pwm: band edges must satisfy v_l1 < v_h1 < v_h2");
    }
    if (!(boost_duty_max > 0.0 && boost_duty_max <= 1.0)) {
        throw DomainError("pwm: boost_duty_max must be in (0, 1]");
    }
}

namespace {

constexpr double kAutoStepAt = 0.5e-3;
constexpr double kAutoStepEnd = 3e-3;
constexpr double kAutoIgnitionEnd = 25e-3;

double clampd(double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
}

// Symmetric triangle in [0, 1] with period 1/f_sw, starting at 0 rising.
double triangle(double f_sw, double t) {
    double phase = t * f_sw;
    phase -= std::floor(phase);
    return phase < 0.5 ? 2.0 * phase : 2.0 * (1.0 - phase);
}

// Comparator with the top edge closed so a full-scale command means
// "always on" rather than "on except at the carrier peak".
bool gate_on(double u, double carrier) { return u >= 1.0 || u > carrier; }

}  // namespace

Mode band_mode(const PwmConfig& cfg, double v_ctrl) {
    return v_ctrl <= cfg.v_h1 ? Mode::Buck : Mode::Boost;
}

double band_duty(const PwmConfig& cfg, double v_ctrl) {
    const double v = clampd(v_ctrl, cfg.v_l1, cfg.v_h2);
    if (v <= cfg.v_h1) return (v - cfg.v_l1) / (cfg.v_h1 - cfg.v_l1);
    return (v - cfg.v_h1) / (cfg.v_h2 - cfg.v_h1);
}

PwmResult pwm_states(const PwmConfig& cfg, double v_ctrl, double t) {
    const double carrier = triangle(cfg.f_sw, t);
    const Mode mode = band_mode(cfg, v_ctrl);
    const double u = band_duty(cfg, v_ctrl);
    PwmResult out;
    out.mode = mode;
    if (mode == Mode::Buck) {
        out.sw.sw1 = gate_on(u, carrier);
        out.sw.sw2 = false;
    } else {
        out.sw.sw1 = true;
        out.sw.sw2 = gate_on(u, carrier);
    }
    return out;
}

double effective_dt(const SimConfig& sim, double f_sw, bool switched) {
    const double t_sw = 1.0 / f_sw;
    if (switched) return sim.dt > 0.0 ? sim.dt : t_sw / 500.0;
    return sim.dt_averaged > 0.0 ? sim.dt_averaged : t_sw / 10.0;
}

namespace {

// Partial-fraction realization of the Type-III compensator:
//   K(s) = g0/s + (p1 s + p0)/(b1 s^2 + b2 s + b3)
// The explicit integrator state is what the conditional-integration
// anti-windup freezes.
struct CompensatorRealization {
    double g0, p0, p1;
    double b1, b2, b3;
    double sensor, mod;
    double vmin, vmax;
    bool anti_windup;
};

CompensatorRealization make_realization(const TypeIiiController& k,
                                        const LoopConfig& lcfg,
                                        const PwmConfig& pwm,
                                        bool anti_windup) {
    k.validate();
    lcfg.validate();
    pwm.validate();
    CompensatorRealization c;
    c.g0 = k.a3 / k.b3;
    c.p1 = k.a1 - c.g0 * k.b1;
    c.p0 = k.a2 - c.g0 * k.b2;
    c.b1 = k.b1;
    c.b2 = k.b2;
    c.b3 = k.b3;
    c.sensor = lcfg.sensor_gain;
    c.mod = lcfg.modulator_gain;
    c.vmin = std::max(lcfg.vctrl_min, pwm.v_l1);
    c.vmax = std::min(lcfg.vctrl_max,
                      pwm.v_h1 + pwm.boost_duty_max * (pwm.v_h2 - pwm.v_h1));
    c.anti_windup = anti_windup;
    return c;
}

struct ProfileCursor {
    const ReferenceProfile* profile;
    std::size_t idx = 0;

    // Stage times within a fixed-step integration never decrease, so a
    // forward-only cursor suffices.
    const ReferenceSegment& at(double t) {
        while (idx + 1 < profile->size() &&
               t >= (*profile)[idx + 1].t_start) {
            ++idx;
        }
        return (*profile)[idx];
    }
};

void check_profile(const ReferenceProfile& profile) {
    if (profile.empty()) throw DomainError("empty reference profile");
    if (profile.front().t_start != 0.0) {
        throw DomainError("reference profile must start at t = 0");
    }
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (!(profile[i].r_load > 0.0)) {
            throw DomainError("reference profile: r_load must be > 0");
        }
        if (i > 0 && !(profile[i].t_start > profile[i - 1].t_start)) {
            throw DomainError("reference profile: segments must be sorted");
        }
    }
}

void check_sim_window(const SimConfig& sim, double f_sw, double t_end,
                      bool switched) {
    const double t_sw = 1.0 / f_sw;
    const double dt = effective_dt(sim, f_sw, switched);
    if (switched && dt > t_sw / 100.0) {
        throw DomainError("switched simulation requires dt <= T_sw/100");
    }
    if (!switched && dt > t_sw / 2.0) {
        throw DomainError("averaged simulation requires dt <= T_sw/2");
    }
    if (t_end < 10.0 * t_sw) {
        throw DomainError("simulation window must cover at least 10 periods");
    }
}

// Everything a closed-loop stage evaluation produces: derivatives for the
// stepper plus the observables the trace records.
struct StageEval {
    std::array<double, 5> dx;
    double v_o, v_ctrl;
    double sw1, sw2;
    Mode mode;
};

// State layout: [i_l, v_c, integrator, biquad1, biquad2].
template <bool Switched>
StageEval eval_closed_loop(const CircuitParams& par,
                           const CompensatorRealization& comp,
                           const PwmConfig& pwm, const ReferenceSegment& seg,
                           bool diode_clamp, double t,
                           const std::array<double, 5>& x, bool* dcm_flag) {
    StageEval out;

    const double biq = comp.p0 * x[3] + comp.p1 * x[4];
    const double u_raw = comp.mod * (x[2] + biq);
    const double v_ctrl = clampd(u_raw, comp.vmin, comp.vmax);
    out.v_ctrl = v_ctrl;

    const double i_l = x[0];
    const double v_c = x[1];
    const double r = seg.r_load;

    double di, dv, v_o;
    if constexpr (Switched) {
        const PwmResult pr = pwm_states(pwm, v_ctrl, t);
        out.mode = pr.mode;
        out.sw1 = pr.sw.sw1 ? 1.0 : 0.0;
        out.sw2 = pr.sw.sw2 ? 1.0 : 0.0;

        const double va = pr.sw.sw1 ? par.v_in : 0.0;
        const double i_inj = pr.sw.sw2 ? 0.0 : i_l;
        v_o = r * (v_c + par.r_c * i_inj) / (r + par.r_c);
        const double vb = pr.sw.sw2 ? 0.0 : v_o;
        di = (va - vb - par.r_l * i_l) / par.l;
        // With either switch open the inductor path runs through a diode and
        // cannot carry negative current.
        const bool diode_path = !(pr.sw.sw1 && pr.sw.sw2);
        if (diode_clamp && diode_path && i_l <= 0.0 && di < 0.0) {
            di = 0.0;
            if (dcm_flag) *dcm_flag = true;
        }
        dv = (i_inj - v_o / r) / par.c;
    } else {
        const Mode mode = band_mode(pwm, v_ctrl);
        const double duty = band_duty(pwm, v_ctrl);
        out.mode = mode;
        if (mode == Mode::Buck) {
            out.sw1 = duty;
            out.sw2 = 0.0;
        } else {
            out.sw1 = 1.0;
            out.sw2 = duty;
        }
        const AveragedDerivatives d = averaged_derivatives(
            par, mode, r, {i_l, v_c}, {duty, 0.0, 0.0});
        di = d.di_l_dt;
        dv = d.dv_c_dt;
        v_o = d.v_out;
        if (diode_clamp && i_l <= 0.0 && di < 0.0) {
            di = 0.0;
            if (dcm_flag) *dcm_flag = true;
        }
    }
    out.v_o = v_o;

    const double e = seg.v_ref - comp.sensor * v_o;
    double d_int = comp.g0 * e;
    if (comp.anti_windup && ((u_raw > comp.vmax && e > 0.0) ||
                             (u_raw < comp.vmin && e < 0.0))) {
        d_int = 0.0;
    }

    out.dx = {di, dv, d_int, x[4],
              (e - comp.b3 * x[3] - comp.b2 * x[4]) / comp.b1};
    return out;
}

template <std::size_t N>
void assert_finite(const std::array<double, N>& x, double t) {
    for (double v : x) {
        if (!std::isfinite(v)) throw DivergenceError(t);
    }
}

template <bool Switched>
SimTrace run_closed_loop(const CircuitParams& params,
                         const TypeIiiController& k, const LoopConfig& lcfg,
                         const PwmConfig& pwm, const SimConfig& sim,
                         const ReferenceProfile& profile,
                         const ClosedLoopInit& init, double t_end) {
    params.validate();
    check_profile(profile);
    check_sim_window(sim, pwm.f_sw, t_end, Switched);
    const CompensatorRealization comp =
        make_realization(k, lcfg, pwm, sim.anti_windup);
    const double h = effective_dt(sim, pwm.f_sw, Switched);
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / h));

    SimTrace trace;
    trace.f_sw = pwm.f_sw;
    trace.switched = Switched;
    trace.reserve(n_steps + 1);

    std::array<double, 5> x = {init.plant.i_l, init.plant.v_c,
                               init.integrator, init.biquad1, init.biquad2};
    ProfileCursor cursor{&profile};
    bool dcm = false;

    auto f = [&](double t, const std::array<double, 5>& s) {
        return eval_closed_loop<Switched>(params, comp, pwm, cursor.at(t),
                                          sim.diode_clamp, t, s, &dcm);
    };

    for (std::size_t step = 0; step <= n_steps; ++step) {
        const double t = static_cast<double>(step) * h;
        const StageEval here = f(t, x);
        trace.push_back(t, cursor.at(t).v_ref, here.v_o, x[0], x[1],
                        here.v_ctrl, here.sw1, here.sw2, here.mode);
        if (step == n_steps) break;

        const auto& k1 = here.dx;
        std::array<double, 5> xs;
        for (int i = 0; i < 5; ++i) xs[i] = x[i] + 0.5 * h * k1[i];
        const auto k2 = f(t + 0.5 * h, xs).dx;
        for (int i = 0; i < 5; ++i) xs[i] = x[i] + 0.5 * h * k2[i];
        const auto k3 = f(t + 0.5 * h, xs).dx;
        for (int i = 0; i < 5; ++i) xs[i] = x[i] + h * k3[i];
        const auto k4 = f(t + h, xs).dx;
        for (int i = 0; i < 5; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (sim.diode_clamp && x[0] < 0.0) {
            x[0] = 0.0;
            dcm = true;
        }
        assert_finite(x, t + h);
    }
    trace.dcm_entered = dcm;
    return trace;
}

}  // namespace

ClosedLoopInit closed_loop_equilibrium(const CircuitParams& params,
                                       const TypeIiiController& k,
                                       const LoopConfig& lcfg,
                                       const PwmConfig& pwm, double v_ref,
                                       double r_load) {
    params.validate();
    const CompensatorRealization comp = make_realization(k, lcfg, pwm, true);

    auto steady_output = [&](double v_ctrl) {
        const Mode mode = band_mode(pwm, v_ctrl);
        const double d = band_duty(pwm, v_ctrl);
        if (mode == Mode::Buck) {
            return d * params.v_in * r_load / (r_load + params.r_l);
        }
        const double dp = 1.0 - d;
        return params.v_in * dp * r_load / (dp * dp * r_load + params.r_l);
    };

    const double target = v_ref / lcfg.sensor_gain;
    double lo = comp.vmin, hi = comp.vmax;
    if (steady_output(hi) < target) {
        throw DomainError(
            "closed_loop_equilibrium: reference beyond the regulation range");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (steady_output(mid) < target ? lo : hi) = mid;
    }
    const double v_ctrl = 0.5 * (lo + hi);

    ClosedLoopInit init;
    init.plant = averaged_equilibrium(params, band_mode(pwm, v_ctrl), r_load,
                                      band_duty(pwm, v_ctrl));
    init.integrator = v_ctrl / lcfg.modulator_gain;
    init.biquad1 = 0.0;
    init.biquad2 = 0.0;
    return init;
}

SimTrace simulate_switched(const CircuitParams& params,
                           const TypeIiiController& k, const LoopConfig& lcfg,
                           const PwmConfig& pwm, const SimConfig& sim,
                           const ReferenceProfile& profile,
                           const ClosedLoopInit& init) {
    const double t_end = sim.t_end > 0.0 ? sim.t_end : kAutoStepEnd;
    return run_closed_loop<true>(params, k, lcfg, pwm, sim, profile, init,
                                 t_end);
}

SimTrace simulate_averaged(const CircuitParams& params,
                           const TypeIiiController& k, const LoopConfig& lcfg,
                           const PwmConfig& pwm, const SimConfig& sim,
                           const ReferenceProfile& profile,
                           const ClosedLoopInit& init) {
    const double t_end = sim.t_end > 0.0 ? sim.t_end : kAutoStepEnd;
    return run_closed_loop<false>(params, k, lcfg, pwm, sim, profile, init,
                                  t_end);
}

SimTrace simulate_switched_fixed_ctrl(const CircuitParams& params,
                                      const PwmConfig& pwm,
                                      const SimConfig& sim, double v_ctrl,
                                      double r_load, double t_end,
                                      const AveragedState& init) {
    params.validate();
    pwm.validate();
    if (!(r_load > 0.0)) throw DomainError("r_load must be > 0");
    check_sim_window(sim, pwm.f_sw, t_end, true);
    const double h = effective_dt(sim, pwm.f_sw, true);
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / h));
    const double v = clampd(v_ctrl, pwm.v_l1, pwm.v_h2);

    SimTrace trace;
    trace.f_sw = pwm.f_sw;
    trace.switched = true;
    trace.reserve(n_steps + 1);

    bool dcm = false;
    struct PlantEval {
        std::array<double, 2> dx;
        double v_o, sw1, sw2;
        Mode mode;
    };
    auto f = [&](double t, const std::array<double, 2>& x) {
        PlantEval out;
        const PwmResult pr = pwm_states(pwm, v, t);
        out.mode = pr.mode;
        out.sw1 = pr.sw.sw1 ? 1.0 : 0.0;
        out.sw2 = pr.sw.sw2 ? 1.0 : 0.0;
        const double va = pr.sw.sw1 ? params.v_in : 0.0;
        const double i_inj = pr.sw.sw2 ? 0.0 : x[0];
        const double v_o =
            r_load * (x[1] + params.r_c * i_inj) / (r_load + params.r_c);
        const double vb = pr.sw.sw2 ? 0.0 : v_o;
        double di = (va - vb - params.r_l * x[0]) / params.l;
        const bool diode_path = !(pr.sw.sw1 && pr.sw.sw2);
        if (sim.diode_clamp && diode_path && x[0] <= 0.0 && di < 0.0) {
            di = 0.0;
            dcm = true;
        }
        out.dx = {di, (i_inj - v_o / r_load) / params.c};
        out.v_o = v_o;
        return out;
    };

    std::array<double, 2> x = {init.i_l, init.v_c};
    for (std::size_t step = 0; step <= n_steps; ++step) {
        const double t = static_cast<double>(step) * h;
        const PlantEval here = f(t, x);
        trace.push_back(t, 0.0, here.v_o, x[0], x[1], v, here.sw1, here.sw2,
                        here.mode);
        if (step == n_steps) break;

        const auto& k1 = here.dx;
        std::array<double, 2> xs;
        for (int i = 0; i < 2; ++i) xs[i] = x[i] + 0.5 * h * k1[i];
        const auto k2 = f(t + 0.5 * h, xs).dx;
        for (int i = 0; i < 2; ++i) xs[i] = x[i] + 0.5 * h * k2[i];
        const auto k3 = f(t + 0.5 * h, xs).dx;
        for (int i = 0; i < 2; ++i) xs[i] = x[i] + h * k3[i];
        const auto k4 = f(t + h, xs).dx;
        for (int i = 0; i < 2; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (sim.diode_clamp && x[0] < 0.0) {
            x[0] = 0.0;
            dcm = true;
        }
        assert_finite(x, t + h);
    }
    trace.dcm_entered = dcm;
    return trace;
}

SimTrace simulate_averaged_fixed_duty(const CircuitParams& params, Mode mode,
                                      const SimConfig& sim,
                                      const std::function<double(double)>& duty,
                                      double r_load, double t_end,
                                      const AveragedState& init) {
    params.validate();
    if (!(r_load > 0.0)) throw DomainError("r_load must be > 0");
    check_sim_window(sim, params.f_sw, t_end, false);
    const double h = effective_dt(sim, params.f_sw, false);
    const auto n_steps = static_cast<std::size_t>(std::llround(t_end / h));

    SimTrace trace;
    trace.f_sw = params.f_sw;
    trace.switched = false;
    trace.reserve(n_steps + 1);

    bool dcm = false;
    struct PlantEval {
        std::array<double, 2> dx;
        double v_o, d;
    };
    auto f = [&](double t, const std::array<double, 2>& x) {
        const double d = duty(t);
        const AveragedDerivatives der = averaged_derivatives(
            params, mode, r_load, {x[0], x[1]}, {d, 0.0, 0.0});
        double di = der.di_l_dt;
        if (sim.diode_clamp && x[0] <= 0.0 && di < 0.0) {
            di = 0.0;
            dcm = true;
        }
        return PlantEval{{di, der.dv_c_dt}, der.v_out, d};
    };

    std::array<double, 2> x = {init.i_l, init.v_c};
    for (std::size_t step = 0; step <= n_steps; ++step) {
        const double t = static_cast<double>(step) * h;
        const PlantEval here = f(t, x);
        const double s1 = mode == Mode::Buck ? here.d : 1.0;
        const double s2 = mode == Mode::Buck ? 0.0 : here.d;
        trace.push_back(t, 0.0, here.v_o, x[0], x[1], 0.0, s1, s2, mode);
        if (step == n_steps) break;

        const auto& k1 = here.dx;
        std::array<double, 2> xs;
        for (int i = 0; i < 2; ++i) xs[i] = x[i] + 0.5 * h * k1[i];
        const auto k2 = f(t + 0.5 * h, xs).dx;
        for (int i = 0; i < 2; ++i) xs[i] = x[i] + 0.5 * h * k2[i];
        const auto k3 = f(t + 0.5 * h, xs).dx;
        for (int i = 0; i < 2; ++i) xs[i] = x[i] + h * k3[i];
        const auto k4 = f(t + h, xs).dx;
        for (int i = 0; i < 2; ++i) {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (sim.diode_clamp && x[0] < 0.0) {
            x[0] = 0.0;
            dcm = true;
        }
        assert_finite(x, t + h);
    }
    trace.dcm_entered = dcm;
    return trace;
}

ScenarioSpec single_mode_step_scenario(const CircuitParams& params,
                                       const TypeIiiController& k,
                                       const LoopConfig& lcfg,
                                       const PwmConfig& pwm,
                                       const SimConfig& sim, Mode mode,
                                       double v_to, double v_from) {
    const double step_at = sim.step_at > 0.0 ? sim.step_at : kAutoStepAt;
    const double t_end = sim.t_end > 0.0 ? sim.t_end : kAutoStepEnd;
    if (!(step_at < t_end)) {
        throw DomainError("step scenario: step_at must lie before t_end");
    }
    const double r = load_resistance(v_to, params.p_load);
    if (v_from <= 0.0) {
        v_from = mode == Mode::Boost ? params.v_in : 0.9 * v_to;
    }

    ScenarioSpec spec;
    spec.profile = {{0.0, v_from, r}, {step_at, v_to, r}};
    spec.init = closed_loop_equilibrium(params, k, lcfg, pwm, v_from, r);
    spec.step_times = {step_at};
    spec.t_end = t_end;
    return spec;
}

ScenarioSpec ignition_scenario(const CircuitParams& params,
                               const TypeIiiController& k,
                               const LoopConfig& lcfg, const PwmConfig& pwm,
                               const SimConfig& sim, double v_boost,
                               double v_buck) {
    const double step_at = sim.step_at > 0.0 ? sim.step_at : kAutoStepAt;
    const double t_end = sim.t_end > 0.0 ? sim.t_end : kAutoIgnitionEnd;
    if (!(step_at < t_end)) {
        throw DomainError("ignition scenario: step_at must lie before t_end");
    }
    // The run-voltage step happens once the ignition transient has settled;
    // the long tail afterwards covers the load-discharge-limited descent.
    const double t_buck = step_at + 0.15 * (t_end - step_at);

    const double r_pre = load_resistance(params.v_in, params.p_load);
    ScenarioSpec spec;
    spec.profile = {{0.0, params.v_in, r_pre},
                    {step_at, v_boost, load_resistance(v_boost, params.p_load)},
                    {t_buck, v_buck, load_resistance(v_buck, params.p_load)}};
    spec.init = closed_loop_equilibrium(params, k, lcfg, pwm, params.v_in,
                                        r_pre);
    spec.step_times = {step_at, t_buck};
    spec.t_end = t_end;
    return spec;
}

}  // namespace cbb
