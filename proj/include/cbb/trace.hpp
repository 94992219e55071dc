#pragma once

#include <iosfwd>
#include <vector>

#include "cbb/converter.hpp"

namespace cbb {

/// Uniform-grid time series produced by the simulators.
///
/// For switched runs sw1/sw2 hold the gate states as 0/1; for averaged runs
/// they hold each switch's continuous duty. All series have equal length.
struct SimTrace {
    std::vector<double> t;
    std::vector<double> v_ref;
    std::vector<double> v_o;
    std::vector<double> i_l;
    std::vector<double> v_c;
    std::vector<double> v_ctrl;
    std::vector<double> sw1;
    std::vector<double> sw2;
    std::vector<Mode> mode;

    double f_sw = 0.0;          ///< switching frequency the run used [Hz]
    bool switched = false;      ///< true for switched-topology runs
    bool dcm_entered = false;   ///< diode clamp held the inductor current at 0

    std::size_t size() const { return t.size(); }
    void reserve(std::size_t n);
    void push_back(double t_, double ref, double vo, double il, double vc,
                   double vctrl, double s1, double s2, Mode m);
};

/// Step-response figures extracted from a trace.
struct StepMetrics {
    double rise_time;            ///< 10% -> 90% of the step span [s]
    double settling_time;        ///< step instant -> last entry into +/-2% [s]
    double overshoot;            ///< peak beyond final reference / step span
    double steady_state_error;   ///< |tail mean - ref| / ref
    double ripple_fraction;      ///< tail peak-to-peak output ripple / ref
                                 ///< (zero for averaged traces)
};

/// Centered one-period moving average of v_o; used for every level decision
/// on switched traces. Returns v_o unchanged for averaged traces.
std::vector<double> cycle_average(const SimTrace& trace);

/// Extracts StepMetrics around the reference step at step_at.
///
/// Levels are measured on the cycle-averaged output for switched traces.
/// Rise time interpolates the 10%/90% crossings; settling time is the last
/// entry into the +/-2% band around the final reference, measured from the
/// step instant. Throws SettlingError when the band is never entered.
StepMetrics step_metrics(const SimTrace& trace, double step_at);

/// CSV export: header t,v_ref,v_o,i_l,v_c,v_ctrl,sw1,sw2,mode then one row
/// per sample, full double precision, LF line endings.
void write_trace_csv(std::ostream& out, const SimTrace& trace);

}  // namespace cbb
