#include "cbb/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "cbb/errors.hpp"

namespace cbb {

void SimTrace::reserve(std::size_t n) {
    t.reserve(n);
    v_ref.reserve(n);
    v_o.reserve(n);
    i_l.reserve(n);
    v_c.reserve(n);
    v_ctrl.reserve(n);
    sw1.reserve(n);
    sw2.reserve(n);
    mode.reserve(n);
}

void SimTrace::push_back(double t_, double ref, double vo, double il,
                         double vc, double vctrl, double s1, double s2,
                         Mode m) {
    t.push_back(t_);
    v_ref.push_back(ref);
    v_o.push_back(vo);
    i_l.push_back(il);
    v_c.push_back(vc);
    v_ctrl.push_back(vctrl);
    sw1.push_back(s1);
    sw2.push_back(s2);
    mode.push_back(m);
}

std::vector<double> cycle_average(const SimTrace& trace) {
    if (!trace.switched || trace.size() < 2 || trace.f_sw <= 0.0) {
        return trace.v_o;
    }
    const double dt = trace.t[1] - trace.t[0];
    const long half = std::max<long>(1, std::lround(0.5 / (trace.f_sw * dt)));
    const long n = static_cast<long>(trace.size());

    // Prefix sums keep this O(n) even for half-million-sample runs.
    std::vector<double> prefix(trace.size() + 1, 0.0);
    for (long i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + trace.v_o[i];

    std::vector<double> out(trace.size());
    for (long i = 0; i < n; ++i) {
        const long lo = std::max<long>(0, i - half);
        const long hi = std::min<long>(n, i + half + 1);
        out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
    return out;
}

namespace {

// Linear interpolation of the time where y crosses level between samples
// i-1 and i.
double crossing_time(const std::vector<double>& t, const std::vector<double>& y,
                     std::size_t i, double level) {
    const double y0 = y[i - 1], y1 = y[i];
    if (y1 == y0) return t[i];
    const double frac = (level - y0) / (y1 - y0);
    return t[i - 1] + frac * (t[i] - t[i - 1]);
}

}  // namespace

StepMetrics step_metrics(const SimTrace& trace, double step_at) {
    if (trace.size() < 4) {
        throw DomainError("step_metrics: trace too short");
    }
    const std::vector<double> y = cycle_average(trace);

    std::size_t i_step = 0;
    while (i_step < trace.size() && trace.t[i_step] < step_at) ++i_step;
    if (i_step >= trace.size() - 2) {
        throw DomainError("step_metrics: step_at beyond the end of the trace");
    }

    const double v_final = trace.v_ref.back();
    const double v_start = y[i_step];
    const double span = v_final - v_start;
    const double direction = span >= 0.0 ? 1.0 : -1.0;

    StepMetrics m{};

    // Flat trace (no real step): all figures collapse to zero except the
    // tail statistics.
    const bool flat = std::abs(span) < 1e-12 * std::max(1.0, std::abs(v_final));

    // Rise time: first crossings of the 10% and 90% levels after the step.
    if (!flat) {
        const double lvl10 = v_start + 0.1 * span;
        const double lvl90 = v_start + 0.9 * span;
        double t10 = -1.0, t90 = -1.0;
        for (std::size_t i = i_step + 1; i < y.size(); ++i) {
            if (t10 < 0.0 && direction * (y[i] - lvl10) >= 0.0) {
                t10 = crossing_time(trace.t, y, i, lvl10);
            }
            if (t90 < 0.0 && direction * (y[i] - lvl90) >= 0.0) {
                t90 = crossing_time(trace.t, y, i, lvl90);
                break;
            }
        }
        if (t10 < 0.0 || t90 < 0.0) {
            throw SettlingError(
                "step_metrics: output never traversed the 10-90% span");
        }
        m.rise_time = t90 - t10;
    }

    // Overshoot: peak excursion beyond the final reference, in the step
    // direction, as a fraction of the step span.
    if (!flat) {
        double peak = 0.0;
        for (std::size_t i = i_step; i < y.size(); ++i) {
            peak = std::max(peak, direction * (y[i] - v_final));
        }
        m.overshoot = std::max(0.0, peak / std::abs(span));
    }

    // Settling: last entry into the +/-2% band around the final reference.
    {
        const double band = 0.02 * std::abs(v_final);
        std::size_t last_outside = 0;
        bool ever_inside = false;
        bool outside_found = false;
        for (std::size_t i = i_step; i < y.size(); ++i) {
            if (std::abs(y[i] - v_final) > band) {
                last_outside = i;
                outside_found = true;
            } else {
                ever_inside = true;
            }
        }
        if (!ever_inside || (outside_found && last_outside + 1 >= y.size())) {
            throw SettlingError(
                "step_metrics: output did not settle into the +/-2% band "
                "within the trace");
        }
        if (!outside_found) {
            m.settling_time = 0.0;
        } else {
            const std::size_t i = last_outside + 1;
            const double level = y[last_outside] > v_final ? v_final + band
                                                           : v_final - band;
            m.settling_time = crossing_time(trace.t, y, i, level) - step_at;
        }
    }

    // Tail statistics over the final 10% of the post-step window.
    {
        const double t_end = trace.t.back();
        const double t_tail = t_end - 0.1 * (t_end - step_at);
        std::size_t i_tail = i_step;
        while (i_tail < trace.size() && trace.t[i_tail] < t_tail) ++i_tail;
        if (i_tail >= trace.size()) i_tail = trace.size() - 1;

        double sum = 0.0;
        std::size_t count = 0;
        double raw_min = trace.v_o[i_tail], raw_max = trace.v_o[i_tail];
        for (std::size_t i = i_tail; i < trace.size(); ++i) {
            sum += y[i];
            ++count;
            raw_min = std::min(raw_min, trace.v_o[i]);
            raw_max = std::max(raw_max, trace.v_o[i]);
        }
        const double mean = sum / static_cast<double>(count);
        const double ref_mag = std::max(std::abs(v_final), 1e-12);
        m.steady_state_error = std::abs(mean - v_final) / ref_mag;
        m.ripple_fraction =
            trace.switched ? (raw_max - raw_min) / ref_mag : 0.0;
    }

    return m;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    out << "t,v_ref,v_o,i_l,v_c,v_ctrl,sw1,sw2,mode\n";
    char buf[512];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        std::snprintf(buf, sizeof buf,
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n",
                      trace.t[i], trace.v_ref[i], trace.v_o[i], trace.i_l[i],
                      trace.v_c[i], trace.v_ctrl[i], trace.sw1[i],
                      trace.sw2[i], to_string(trace.mode[i]));
        out << buf;
    }
}

}  // namespace cbb
