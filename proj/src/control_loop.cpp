#include "cbb/control_loop.hpp"

#include <cmath>

#include "cbb/errors.hpp"

namespace cbb {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kStabilityEps = 1e-6;  // rad/s
}  // namespace

void TypeIiiController::validate() const {
    if (!(b1 > 0.0) || !(b3 > 0.0)) {
        throw DomainError(
            "controller denominator quadratic must have b1 > 0 and b3 > 0");
    }
    if (!(a3 > 0.0)) {
        throw DomainError("controller integral coefficient a3 must be > 0");
    }
}

void LoopConfig::validate() const {
    if (!(sensor_gain > 0.0) || !(modulator_gain > 0.0)) {
        throw DomainError("loop gains must be > 0");
    }
    if (!(vctrl_min < vctrl_max)) {
        throw DomainError("control-signal limits must satisfy min < max");
    }
}

TransferFunction type_iii_tf(const TypeIiiController& k) {
    k.validate();
    return TransferFunction(Polynomial{k.a3, k.a2, k.a1},
                            Polynomial{0.0, k.b3, k.b2, k.b1});
}

TransferFunction loop_gain(const TransferFunction& plant,
                           const TypeIiiController& k, const LoopConfig& cfg) {
    cfg.validate();
    return scale(cfg.sensor_gain * cfg.modulator_gain,
                 series(type_iii_tf(k), plant));
}

TransferFunction closed_loop(const TransferFunction& plant,
                             const TypeIiiController& k,
                             const LoopConfig& cfg) {
    cfg.validate();
    // forward = modulator * K * plant; feedback = sensor.
    const TransferFunction forward =
        scale(cfg.modulator_gain, series(type_iii_tf(k), plant));
    const Polynomial closed_den =
        forward.den + cfg.sensor_gain * forward.num;
    return TransferFunction(forward.num, closed_den);
}

namespace {

struct GridPoint {
    double omega;
    double log_mag;      // ln |T(jw)|
    double phase_deg;    // unwrapped along the grid
};

double raw_phase_deg(const TransferFunction& tf, double omega) {
    const std::complex<double> h = eval_jw(tf, omega);
    return std::atan2(h.imag(), h.real()) * 180.0 / kPi;
}

// Ln-magnitude crossing of zero (|T| = 1) refined by bisection in log(w).
double bisect_log_mag(const TransferFunction& tf, double w_lo, double w_hi) {
    double f_lo = std::log(std::abs(eval_jw(tf, w_lo)));
    for (int it = 0; it < 80; ++it) {
        const double w_mid = std::sqrt(w_lo * w_hi);
        if ((w_hi - w_lo) <= 1e-6 * w_lo) return w_mid;
        const double f_mid = std::log(std::abs(eval_jw(tf, w_mid)));
        if ((f_lo <= 0.0) == (f_mid <= 0.0)) {
            w_lo = w_mid;
            f_lo = f_mid;
        } else {
            w_hi = w_mid;
        }
    }
    return std::sqrt(w_lo * w_hi);
}

// Phase crossing of -180 deg refined by bisection; the candidate phase at
// each midpoint is re-anchored to the unwrapped value at the bracket edge.
double bisect_phase(const TransferFunction& tf, double w_lo, double w_hi,
                    double phase_lo_unwrapped) {
    auto unwrap_near = [&](double raw, double anchor) {
        while (raw - anchor > 180.0) raw -= 360.0;
        while (raw - anchor < -180.0) raw += 360.0;
        return raw;
    };
    double f_lo = phase_lo_unwrapped + 180.0;
    double anchor = phase_lo_unwrapped;
    for (int it = 0; it < 80; ++it) {
        const double w_mid = std::sqrt(w_lo * w_hi);
        if ((w_hi - w_lo) <= 1e-6 * w_lo) return w_mid;
        const double p_mid = unwrap_near(raw_phase_deg(tf, w_mid), anchor);
        const double f_mid = p_mid + 180.0;
        if ((f_lo <= 0.0) == (f_mid <= 0.0)) {
            w_lo = w_mid;
            f_lo = f_mid;
            anchor = p_mid;
        } else {
            w_hi = w_mid;
        }
    }
    return std::sqrt(w_lo * w_hi);
}

}  // namespace

MarginReport margins(const TransferFunction& loop, double f_lo, double f_hi,
                     int grid_points) {
    if (!(f_lo > 0.0) || !(f_lo < f_hi)) {
        throw DomainError("margins: need 0 < f_lo < f_hi");
    }
    if (grid_points < 2) {
        throw DomainError("margins: need at least 2 grid points");
    }

    std::vector<GridPoint> grid(static_cast<std::size_t>(grid_points));
    const double lw_lo = std::log(2.0 * kPi * f_lo);
    const double lw_hi = std::log(2.0 * kPi * f_hi);
    for (int i = 0; i < grid_points; ++i) {
        const double w = std::exp(
            lw_lo + (lw_hi - lw_lo) * i / double(grid_points - 1));
        const std::complex<double> h = eval_jw(loop, w);
        grid[i].omega = w;
        grid[i].log_mag = std::log(std::abs(h));
        grid[i].phase_deg = std::atan2(h.imag(), h.real()) * 180.0 / kPi;
        if (i > 0) {
            double& p = grid[i].phase_deg;
            const double prev = grid[i - 1].phase_deg;
            while (p - prev > 180.0) p -= 360.0;
            while (p - prev < -180.0) p += 360.0;
        }
    }

    MarginReport report;

    // Gain crossover -> phase margin.
    for (int i = 1; i < grid_points; ++i) {
        if ((grid[i - 1].log_mag <= 0.0) != (grid[i].log_mag <= 0.0) ||
            grid[i].log_mag == 0.0) {
            const double w_c =
                bisect_log_mag(loop, grid[i - 1].omega, grid[i].omega);
            double phase = raw_phase_deg(loop, w_c);
            while (phase - grid[i - 1].phase_deg > 180.0) phase -= 360.0;
            while (phase - grid[i - 1].phase_deg < -180.0) phase += 360.0;
            report.gain_crossover_hz = w_c / (2.0 * kPi);
            report.phase_margin_deg = 180.0 + phase;
            break;
        }
    }

    // Phase crossover (-180 deg) -> gain margin.
    for (int i = 1; i < grid_points; ++i) {
        const double f0 = grid[i - 1].phase_deg + 180.0;
        const double f1 = grid[i].phase_deg + 180.0;
        if ((f0 <= 0.0) != (f1 <= 0.0) || f1 == 0.0) {
            const double w_pc = bisect_phase(loop, grid[i - 1].omega,
                                             grid[i].omega,
                                             grid[i - 1].phase_deg);
            const double mag = std::abs(eval_jw(loop, w_pc));
            report.phase_crossover_hz = w_pc / (2.0 * kPi);
            report.gain_margin_db = -20.0 * std::log10(mag);
            break;
        }
    }

    return report;
}

StabilityReport stability_check(const TransferFunction& tf) {
    StabilityReport report;
    report.poles = poles(tf);
    report.stable = true;
    for (const auto& p : report.poles) {
        if (p.real() >= -kStabilityEps) {
            report.stable = false;
            break;
        }
    }
    return report;
}

GateReport goal_gate(const StepMetrics& metrics,
                     const PerformanceGoals& goals) {
    GateReport g;
    g.rise_time_ok = metrics.rise_time <= goals.rise_time_max;
    g.settling_time_ok = metrics.settling_time <= goals.settling_time_max;
    g.overshoot_ok = metrics.overshoot <= goals.overshoot_max;
    g.steady_state_error_ok =
        metrics.steady_state_error <=
        goals.steady_state_error_max + metrics.ripple_fraction;
    g.overall = g.rise_time_ok && g.settling_time_ok && g.overshoot_ok &&
                g.steady_state_error_ok;
    return g;
}

}  // namespace cbb
