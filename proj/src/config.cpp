#include "cbb/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <vector>

namespace cbb {

namespace {

struct DoubleKey {
    const char* name;
    std::function<double&(RunConfig&)> ref;
};

struct BoolKey {
    const char* name;
    std::function<bool&(RunConfig&)> ref;
};

const std::vector<DoubleKey>& double_keys() {
    static const std::vector<DoubleKey> keys = {
        {"v_in", [](RunConfig& c) -> double& { return c.circuit.v_in; }},
        {"l", [](RunConfig& c) -> double& { return c.circuit.l; }},
        {"c", [](RunConfig& c) -> double& { return c.circuit.c; }},
        {"r_l", [](RunConfig& c) -> double& { return c.circuit.r_l; }},
        {"r_c", [](RunConfig& c) -> double& { return c.circuit.r_c; }},
        {"f_sw", [](RunConfig& c) -> double& { return c.circuit.f_sw; }},
        {"p_load", [](RunConfig& c) -> double& { return c.circuit.p_load; }},
        {"a1", [](RunConfig& c) -> double& { return c.controller.a1; }},
        {"a2", [](RunConfig& c) -> double& { return c.controller.a2; }},
        {"a3", [](RunConfig& c) -> double& { return c.controller.a3; }},
        {"b1", [](RunConfig& c) -> double& { return c.controller.b1; }},
        {"b2", [](RunConfig& c) -> double& { return c.controller.b2; }},
        {"b3", [](RunConfig& c) -> double& { return c.controller.b3; }},
        {"sensor_gain",
         [](RunConfig& c) -> double& { return c.loop.sensor_gain; }},
        {"modulator_gain",
         [](RunConfig& c) -> double& { return c.loop.modulator_gain; }},
        {"vctrl_min", [](RunConfig& c) -> double& { return c.loop.vctrl_min; }},
        {"vctrl_max", [](RunConfig& c) -> double& { return c.loop.vctrl_max; }},
        {"v_l1", [](RunConfig& c) -> double& { return c.pwm.v_l1; }},
        {"v_h1", [](RunConfig& c) -> double& { return c.pwm.v_h1; }},
        {"v_h2", [](RunConfig& c) -> double& { return c.pwm.v_h2; }},
        {"boost_duty_max",
         [](RunConfig& c) -> double& { return c.pwm.boost_duty_max; }},
        {"dt", [](RunConfig& c) -> double& { return c.sim.dt; }},
        {"dt_averaged",
         [](RunConfig& c) -> double& { return c.sim.dt_averaged; }},
        {"t_end", [](RunConfig& c) -> double& { return c.sim.t_end; }},
        {"step_at", [](RunConfig& c) -> double& { return c.sim.step_at; }},
        {"v_ref_boost", [](RunConfig& c) -> double& { return c.v_ref_boost; }},
        {"v_ref_buck", [](RunConfig& c) -> double& { return c.v_ref_buck; }},
        {"deadband_frac",
         [](RunConfig& c) -> double& { return c.deadband_frac; }},
        {"margin_f_lo", [](RunConfig& c) -> double& { return c.margin_f_lo; }},
        {"margin_f_hi", [](RunConfig& c) -> double& { return c.margin_f_hi; }},
        {"rise_time_max",
         [](RunConfig& c) -> double& { return c.goals.rise_time_max; }},
        {"settling_time_max",
         [](RunConfig& c) -> double& { return c.goals.settling_time_max; }},
        {"overshoot_max",
         [](RunConfig& c) -> double& { return c.goals.overshoot_max; }},
        {"steady_state_error_max",
         [](RunConfig& c) -> double& {
             return c.goals.steady_state_error_max;
         }},
    };
    return keys;
}

const std::vector<BoolKey>& bool_keys() {
    static const std::vector<BoolKey> keys = {
        {"diode_clamp", [](RunConfig& c) -> bool& { return c.sim.diode_clamp; }},
        {"anti_windup", [](RunConfig& c) -> bool& { return c.sim.anti_windup; }},
    };
    return keys;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw DomainError("config: cannot parse value '" + value +
                          "' for key '" + key + "'");
    }
    if (pos != value.size()) {
        throw DomainError("config: trailing characters in value '" + value +
                          "' for key '" + key + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1") return true;
    if (value == "off" || value == "false" || value == "0") return false;
    throw DomainError("config: expected on/off for key '" + key + "', got '" +
                      value + "'");
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    for (const auto& k : double_keys()) {
        if (key == k.name) {
            k.ref(*this) = parse_double(key, value);
            return;
        }
    }
    for (const auto& k : bool_keys()) {
        if (key == k.name) {
            k.ref(*this) = parse_bool(key, value);
            return;
        }
    }
    throw DomainError("config: unknown key '" + key + "'");
}

void RunConfig::set_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw DomainError("override must have the form key=value: '" +
                          assignment + "'");
    }
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::validate() const {
    circuit.validate();
    controller.validate();
    loop.validate();
    pwm_config().validate();
    if (!(v_ref_boost > 0.0) || !(v_ref_buck > 0.0)) {
        throw DomainError("config: reference voltages must be > 0");
    }
    if (!(deadband_frac > 0.0 && deadband_frac < 0.5)) {
        throw DomainError("config: deadband_frac must be in (0, 0.5)");
    }
    if (!(margin_f_lo > 0.0 && margin_f_lo < margin_f_hi)) {
        throw DomainError("config: need 0 < margin_f_lo < margin_f_hi");
    }
    if (sim.dt < 0.0 || sim.dt_averaged < 0.0 || sim.t_end < 0.0 ||
        sim.step_at < 0.0) {
        throw DomainError("config: time settings must be >= 0 (0 = auto)");
    }
    if (!(goals.rise_time_max > 0.0 && goals.settling_time_max > 0.0 &&
          goals.overshoot_max > 0.0 && goals.steady_state_error_max >= 0.0)) {
        throw DomainError("config: invalid performance goals");
    }
}

void RunConfig::dump(std::ostream& out) const {
    char buf[64];
    RunConfig& self = const_cast<RunConfig&>(*this);
    out << "# converter run configuration (SI units)\n";
    for (const auto& k : double_keys()) {
        std::snprintf(buf, sizeof buf, "%.17g", k.ref(self));
        out << k.name << " = " << buf << "\n";
    }
    for (const auto& k : bool_keys()) {
        out << k.name << " = " << (k.ref(self) ? "on" : "off") << "\n";
    }
}

RunConfig RunConfig::parse(std::istream& in) {
    RunConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DomainError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        }
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open config file '" + path + "'");
    return parse(in);
}

}  // namespace cbb
