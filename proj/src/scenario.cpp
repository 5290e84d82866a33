#include "gridemt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

namespace gridemt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ScenarioError("scenario: " + path + ": " + msg);
}

const json& member(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing required field \"") + key + "\"");
    return *it;
}

void check_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

void check_fields(const json& obj, const std::string& path,
                  std::initializer_list<std::string_view> allowed) {
    check_object(obj, path);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (std::string_view a : allowed) {
            if (it.key() == a) {
                known = true;
                break;
            }
        }
        if (!known) fail(path, "unknown field \"" + it.key() + "\"");
    }
}

double num_at(const json& obj, const std::string& path, const char* key) {
    const json& v = member(obj, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

double num_or(const json& obj, const std::string& path, const char* key, double def) {
    auto it = obj.find(key);
    if (it == obj.end()) return def;
    if (!it->is_number()) fail(path + "." + key, "expected a number");
    return it->get<double>();
}

int int_at(const json& obj, const std::string& path, const char* key) {
    const json& v = member(obj, path, key);
    if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
    return v.get<int>();
}

bool bool_or(const json& obj, const std::string& path, const char* key, bool def) {
    auto it = obj.find(key);
    if (it == obj.end()) return def;
    if (!it->is_boolean()) fail(path + "." + key, "expected a boolean");
    return it->get<bool>();
}

std::string str_at(const json& obj, const std::string& path, const char* key) {
    const json& v = member(obj, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

std::string str_or(const json& obj, const std::string& path, const char* key,
                   const std::string& def) {
    auto it = obj.find(key);
    if (it == obj.end()) return def;
    if (!it->is_string()) fail(path + "." + key, "expected a string");
    return it->get<std::string>();
}

ComponentParams parse_params(const std::string& type, const json& p, const std::string& path) {
    if (type == "machine") {
        check_fields(p, path,
                     {"r_s", "x_l", "x_d", "x_q", "x_d_t", "x_q_t", "x_d_st", "x_q_st", "t_d0_t",
                      "t_q0_t", "t_d0_st", "t_q0_st", "inertia_j", "damping_d", "gov_k", "gov_t",
                      "gov_p_ref", "exc_k", "exc_t", "exc_t2", "exc_v_ref", "exc_rc", "exc_xc"});
        MachineParams m{};
        m.r_s = num_at(p, path, "r_s");
        m.x_l = num_at(p, path, "x_l");
        m.x_d = num_at(p, path, "x_d");
        m.x_q = num_at(p, path, "x_q");
        m.x_d_t = num_at(p, path, "x_d_t");
        m.x_q_t = num_at(p, path, "x_q_t");
        m.x_d_st = num_at(p, path, "x_d_st");
        m.x_q_st = num_at(p, path, "x_q_st");
        m.t_d0_t = num_at(p, path, "t_d0_t");
        m.t_q0_t = num_at(p, path, "t_q0_t");
        m.t_d0_st = num_at(p, path, "t_d0_st");
        m.t_q0_st = num_at(p, path, "t_q0_st");
        m.inertia_j = num_at(p, path, "inertia_j");
        m.damping_d = num_at(p, path, "damping_d");
        m.gov_k = num_at(p, path, "gov_k");
        m.gov_t = num_at(p, path, "gov_t");
        m.gov_p_ref = num_or(p, path, "gov_p_ref", 0.0);
        m.exc_k = num_at(p, path, "exc_k");
        m.exc_t = num_at(p, path, "exc_t");
        m.exc_t2 = num_at(p, path, "exc_t2");
        m.exc_v_ref = num_at(p, path, "exc_v_ref");
        m.exc_rc = num_or(p, path, "exc_rc", 0.0);
        m.exc_xc = num_or(p, path, "exc_xc", 0.0);
        return m;
    }
    if (type == "pi_line") {
        check_fields(p, path, {"r", "l", "c"});
        return PiLineParams{num_at(p, path, "r"), num_at(p, path, "l"), num_at(p, path, "c")};
    }
    if (type == "series_rl_line") {
        check_fields(p, path, {"r", "l"});
        return SeriesRLLineParams{num_at(p, path, "r"), num_at(p, path, "l")};
    }
    if (type == "rl_load") {
        check_fields(p, path, {"r", "l"});
        return RLLoadParams{num_at(p, path, "r"), num_at(p, path, "l")};
    }
    if (type == "shunt_rc") {
        check_fields(p, path, {"c", "r_parallel"});
        return ShuntRCParams{num_at(p, path, "c"), num_at(p, path, "r_parallel")};
    }
    if (type == "emf_source") {
        check_fields(p, path, {"e_d", "e_q", "r", "l"});
        return EmfSourceParams{num_at(p, path, "e_d"), num_at(p, path, "e_q"),
                               num_at(p, path, "r"), num_at(p, path, "l")};
    }
    if (type == "pq_source") {
        check_fields(p, path, {"p_set", "q_set", "tau_p", "tau_q", "v_floor", "tau_v"});
        PQSourceParams q{};
        q.p_set = num_at(p, path, "p_set");
        q.q_set = num_at(p, path, "q_set");
        q.tau_p = num_at(p, path, "tau_p");
        q.tau_q = num_at(p, path, "tau_q");
        q.v_floor = num_or(p, path, "v_floor", q.v_floor);
        q.tau_v = num_or(p, path, "tau_v", q.tau_v);
        return q;
    }
    fail(path, "unknown component type \"" + type + "\"");
}

Exogenous parse_exo_fields(const json& obj, const std::string& path, Exogenous base) {
    base.exciter_ref_offset = num_or(obj, path, "exciter_ref_offset", base.exciter_ref_offset);
    base.load_scale = num_or(obj, path, "load_scale", base.load_scale);
    base.pq_enabled = bool_or(obj, path, "pq_enabled", base.pq_enabled);
    return base;
}

std::size_t line_of_offset(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') ++line;
    }
    return line;
}

} // namespace

std::vector<double> RGridSpec::values() const {
    if (count < 2) throw ScenarioError("scenario: analysis.r_grid.count must be >= 2");
    if (!(start > stop) || !(stop > 0.0)) {
        throw ScenarioError("scenario: analysis.r_grid requires start > stop > 0");
    }
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(count - 1);
        out[static_cast<std::size_t>(i)] =
            log_spacing ? start * std::pow(stop / start, u) : start + (stop - start) * u;
    }
    return out;
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& ex) {
        std::ostringstream msg;
        msg << "scenario: " << origin << ":" << line_of_offset(text, ex.byte)
            << ": " << ex.what();
        throw ScenarioError(msg.str());
    }
    check_fields(root, origin,
                 {"name", "per_unit", "frame", "components", "buses", "exogenous", "events",
                  "sim", "analysis"});

    Scenario sc;
    sc.name = str_or(root, origin, "name", "");

    if (root.contains("per_unit")) {
        const json& pu = root["per_unit"];
        check_fields(pu, "per_unit", {"s_base_va", "v_base_v", "f_base_hz"});
        try {
            sc.per_unit = PerUnitBase(num_at(pu, "per_unit", "s_base_va"),
                                      num_at(pu, "per_unit", "v_base_v"),
                                      num_at(pu, "per_unit", "f_base_hz"));
        } catch (const std::invalid_argument& ex) {
            fail("per_unit", ex.what());
        }
    }
    sc.spec.frame.omega_base = sc.per_unit.omega_base();
    if (root.contains("frame")) {
        const json& fr = root["frame"];
        check_fields(fr, "frame", {"omega_pu"});
        sc.spec.frame.omega_pu = num_or(fr, "frame", "omega_pu", 1.0);
    }

    const json& comps = member(root, origin, "components");
    if (!comps.is_array() || comps.empty()) fail("components", "expected a non-empty array");
    std::unordered_map<std::string, int> index_of;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const std::string path = "components[" + std::to_string(i) + "]";
        const json& c = comps[i];
        check_fields(c, path, {"name", "type", "params"});
        ComponentSpec spec;
        spec.name = str_at(c, path, "name");
        const std::string type = str_at(c, path, "type");
        spec.params = parse_params(type, member(c, path, "params"), path + ".params");
        if (!index_of.emplace(spec.name, static_cast<int>(i)).second) {
            fail(path, "duplicate component name \"" + spec.name + "\"");
        }
        sc.spec.components.push_back(std::move(spec));
    }

    const json& buses = member(root, origin, "buses");
    if (!buses.is_array() || buses.empty()) fail("buses", "expected a non-empty array");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const std::string path = "buses[" + std::to_string(i) + "]";
        const json& b = buses[i];
        check_fields(b, path, {"name", "attach"});
        BusSpec bus;
        bus.name = str_at(b, path, "name");
        const json& attach = member(b, path, "attach");
        if (!attach.is_array() || attach.empty()) {
            fail(path + ".attach", "expected a non-empty array");
        }
        for (std::size_t k = 0; k < attach.size(); ++k) {
            const std::string apath = path + ".attach[" + std::to_string(k) + "]";
            const json& a = attach[k];
            if (!a.is_array() || a.size() != 2 || !a[0].is_string() ||
                !a[1].is_number_integer()) {
                fail(apath, "expected [\"component\", port]");
            }
            const std::string cname = a[0].get<std::string>();
            auto it = index_of.find(cname);
            if (it == index_of.end()) fail(apath, "unknown component \"" + cname + "\"");
            bus.members.push_back(Attachment{it->second, a[1].get<int>()});
        }
        sc.spec.topology.buses.push_back(std::move(bus));
    }

    if (root.contains("exogenous")) {
        const json& ex = root["exogenous"];
        check_fields(ex, "exogenous", {"exciter_ref_offset", "load_scale", "pq_enabled"});
        sc.schedule.initial = parse_exo_fields(ex, "exogenous", Exogenous{});
    }
    if (root.contains("events")) {
        const json& events = root["events"];
        if (!events.is_array()) fail("events", "expected an array");
        Exogenous prev = sc.schedule.initial;
        double prev_time = 0.0;
        for (std::size_t i = 0; i < events.size(); ++i) {
            const std::string path = "events[" + std::to_string(i) + "]";
            const json& e = events[i];
            check_fields(e, path, {"time", "exciter_ref_offset", "load_scale", "pq_enabled"});
            Event ev;
            ev.time = num_at(e, path, "time");
            if (!(ev.time > 0.0) || (i > 0 && !(ev.time > prev_time))) {
                fail(path + ".time", "event times must be positive and strictly increasing");
            }
            ev.exogenous = parse_exo_fields(e, path, prev);
            prev = ev.exogenous;
            prev_time = ev.time;
            sc.schedule.events.push_back(ev);
        }
    }

    if (root.contains("sim")) {
        const json& sim = root["sim"];
        check_fields(sim, "sim",
                     {"t_end", "step", "method", "record_interval", "divergence_limit",
                      "rel_tol", "abs_tol", "start"});
        sc.sim.t_end = num_or(sim, "sim", "t_end", sc.sim.t_end);
        sc.sim.step = num_or(sim, "sim", "step", sc.sim.step);
        sc.sim.record_interval = num_or(sim, "sim", "record_interval", sc.sim.record_interval);
        sc.sim.divergence_limit = num_or(sim, "sim", "divergence_limit", sc.sim.divergence_limit);
        sc.sim.rel_tol = num_or(sim, "sim", "rel_tol", sc.sim.rel_tol);
        sc.sim.abs_tol = num_or(sim, "sim", "abs_tol", sc.sim.abs_tol);
        const std::string method = str_or(sim, "sim", "method", "rk4");
        if (method == "rk4") {
            sc.sim.method = Method::rk4;
        } else if (method == "rk45") {
            sc.sim.method = Method::rk45;
        } else {
            fail("sim.method", "expected \"rk4\" or \"rk45\"");
        }
        const std::string start = str_or(sim, "sim", "start", "equilibrium");
        if (start == "equilibrium") {
            sc.equilibrium_start = true;
        } else if (start == "flat") {
            sc.equilibrium_start = false;
        } else {
            fail("sim.start", "expected \"equilibrium\" or \"flat\"");
        }
    }

    if (root.contains("analysis")) {
        const json& an = root["analysis"];
        check_fields(an, "analysis",
                     {"slack_machine", "load_component", "line_component", "support_component",
                      "r_grid", "disturbance", "stability", "sweep_t_end", "spectrum"});
        AnalysisConfig& a = sc.analysis;
        a.slack_machine = str_or(an, "analysis", "slack_machine", "");
        a.load_component = str_or(an, "analysis", "load_component", "");
        a.line_component = str_or(an, "analysis", "line_component", "");
        a.support_component = str_or(an, "analysis", "support_component", "");
        a.sweep_t_end = num_or(an, "analysis", "sweep_t_end", a.sweep_t_end);
        if (an.contains("r_grid")) {
            const json& g = an["r_grid"];
            check_fields(g, "analysis.r_grid", {"start", "stop", "count", "spacing"});
            a.r_grid.start = num_at(g, "analysis.r_grid", "start");
            a.r_grid.stop = num_at(g, "analysis.r_grid", "stop");
            a.r_grid.count = int_at(g, "analysis.r_grid", "count");
            const std::string spacing = str_or(g, "analysis.r_grid", "spacing", "linear");
            if (spacing == "linear") {
                a.r_grid.log_spacing = false;
            } else if (spacing == "log") {
                a.r_grid.log_spacing = true;
            } else {
                fail("analysis.r_grid.spacing", "expected \"linear\" or \"log\"");
            }
        }
        if (an.contains("disturbance")) {
            const json& d = an["disturbance"];
            check_fields(d, "analysis.disturbance", {"start", "duration", "magnitude"});
            a.disturbance.start = num_or(d, "analysis.disturbance", "start", a.disturbance.start);
            a.disturbance.duration =
                num_or(d, "analysis.disturbance", "duration", a.disturbance.duration);
            a.disturbance.magnitude =
                num_or(d, "analysis.disturbance", "magnitude", a.disturbance.magnitude);
        }
        if (an.contains("stability")) {
            const json& s = an["stability"];
            check_fields(s, "analysis.stability",
                         {"epsilon", "min_periods", "envelope_slack", "final_fraction"});
            a.stability.epsilon = num_or(s, "analysis.stability", "epsilon", a.stability.epsilon);
            a.stability.min_periods =
                num_or(s, "analysis.stability", "min_periods", a.stability.min_periods);
            a.stability.envelope_slack =
                num_or(s, "analysis.stability", "envelope_slack", a.stability.envelope_slack);
            a.stability.final_fraction =
                num_or(s, "analysis.stability", "final_fraction", a.stability.final_fraction);
        }
        if (an.contains("spectrum")) {
            const json& s = an["spectrum"];
            check_fields(s, "analysis.spectrum",
                         {"component", "window_start", "band_center_hz", "band_half_width_hz"});
            a.spectrum.component = str_or(s, "analysis.spectrum", "component", "");
            a.spectrum.window_start =
                num_or(s, "analysis.spectrum", "window_start", a.spectrum.window_start);
            a.spectrum.band_center_hz =
                num_or(s, "analysis.spectrum", "band_center_hz", a.spectrum.band_center_hz);
            a.spectrum.band_half_width_hz = num_or(s, "analysis.spectrum", "band_half_width_hz",
                                                   a.spectrum.band_half_width_hz);
        }
    }

    try {
        CompositeSystem probe(sc.spec);
    } catch (const std::invalid_argument& ex) {
        throw ScenarioError("scenario: " + origin + ": " + ex.what());
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("scenario: cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

} // namespace gridemt
