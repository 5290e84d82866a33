// Command-line front end: scenario loading, simulation runs, PV sweeps, and
// the inertia separation demo. Exit codes: 0 success, 2 validation error,
// 3 diverged run (partial outputs retained).

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "gridemt/csv.hpp"
#include "gridemt/equilibrium.hpp"
#include "gridemt/integrator.hpp"
#include "gridemt/log.hpp"
#include "gridemt/scenario.hpp"
#include "gridemt/sweep.hpp"

namespace fs = std::filesystem;
using namespace gridemt;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitDiverged = 3;

struct CommonArgs {
    std::string scenario;
    std::string out_dir = "out";
    std::optional<double> step;
    std::optional<double> t_end;
    std::optional<double> disturbance_mag;
    bool with_q_support = false;
    std::optional<double> tau_q;
    std::optional<double> q_setpoint;
};

void add_common_flags(CLI::App& cmd, CommonArgs& a) {
    cmd.add_option("scenario", a.scenario, "Scenario file (JSON)")->required();
    cmd.add_option("--out", a.out_dir, "Output directory");
    cmd.add_option("--step", a.step, "Integration step override (s)");
    cmd.add_option("--t-end", a.t_end, "Run length override (s)");
    cmd.add_option("--disturbance-mag", a.disturbance_mag,
                   "Exciter reference pulse magnitude override (p.u.)");
    cmd.add_flag("--with-q-support", a.with_q_support, "Enable PQ support sources");
    cmd.add_option("--tau-q", a.tau_q, "Support tracking time constant override (s)");
    cmd.add_option("--q-setpoint", a.q_setpoint, "Support reactive setpoint override (p.u.)");
}

/// Rewrites the named support source's tracking parameters in place.
void apply_support_overrides(Scenario& sc, const CommonArgs& a) {
    if (!a.tau_q && !a.q_setpoint) return;
    if (sc.analysis.support_component.empty()) {
        throw ScenarioError(
            "scenario: analysis.support_component is required for --tau-q / --q-setpoint");
    }
    for (auto& c : sc.spec.components) {
        if (c.name != sc.analysis.support_component) continue;
        auto* pq = std::get_if<PQSourceParams>(&c.params);
        if (pq == nullptr) {
            throw ScenarioError("scenario: support component '" + c.name +
                                "' is not a pq_source");
        }
        if (a.tau_q) {
            pq->tau_p = *a.tau_q;
            pq->tau_q = *a.tau_q;
        }
        if (a.q_setpoint) pq->q_set = *a.q_setpoint;
        return;
    }
    throw ScenarioError("scenario: unknown support component '" +
                        sc.analysis.support_component + "'");
}

/// Enables PQ sources across the whole schedule.
void enable_support(Scenario& sc) {
    sc.schedule.initial.pq_enabled = true;
    for (auto& ev : sc.schedule.events) ev.exogenous.pq_enabled = true;
}

/// Replaces every nonzero event exciter offset with the override magnitude.
void apply_disturbance_override(Scenario& sc, double mag) {
    for (auto& ev : sc.schedule.events) {
        if (ev.exogenous.exciter_ref_offset != 0.0) ev.exogenous.exciter_ref_offset = mag;
    }
    sc.analysis.disturbance.magnitude = mag;
}

/// Rescales the named line to a new inductance, preserving its r/l and c/l
/// ratios so the damping character of the line is unchanged.
void apply_line_inductance(Scenario& sc, double l_new) {
    if (!(l_new > 0.0)) throw ScenarioError("--line-inductance must be positive");
    if (sc.analysis.line_component.empty()) {
        throw ScenarioError(
            "scenario: analysis.line_component is required for --line-inductance");
    }
    for (auto& c : sc.spec.components) {
        if (c.name != sc.analysis.line_component) continue;
        if (auto* pi = std::get_if<PiLineParams>(&c.params)) {
            const double scale = l_new / pi->l;
            pi->l = l_new;
            pi->r *= scale;
            pi->c *= scale;
            return;
        }
        if (auto* rl = std::get_if<SeriesRLLineParams>(&c.params)) {
            const double scale = l_new / rl->l;
            rl->l = l_new;
            rl->r *= scale;
            return;
        }
        throw ScenarioError("scenario: line component '" + c.name + "' is not a line");
    }
    throw ScenarioError("scenario: unknown line component '" + sc.analysis.line_component + "'");
}

[[nodiscard]] double line_inductance(const Scenario& sc) {
    for (const auto& c : sc.spec.components) {
        if (c.name != sc.analysis.line_component) continue;
        if (const auto* pi = std::get_if<PiLineParams>(&c.params)) return pi->l;
        if (const auto* rl = std::get_if<SeriesRLLineParams>(&c.params)) return rl->l;
    }
    return 0.0;
}

/// Solves the starting state, baking the slack governor reference into the
/// spec so the simulated system is exactly the one that was solved.
[[nodiscard]] std::vector<double> prepare_initial_state(Scenario& sc, CompositeSystem& sys) {
    if (!sc.equilibrium_start) return flat_start(sys);
    int slack = -1;
    if (!sc.analysis.slack_machine.empty()) {
        slack = sys.find_component(sc.analysis.slack_machine);
        if (slack < 0) {
            throw ScenarioError("scenario: unknown slack machine '" + sc.analysis.slack_machine +
                                "'");
        }
    }
    EquilibriumResult eq = find_equilibrium(sc.spec, slack, sc.schedule.initial, flat_start(sys));
    if (!eq.converged) {
        throw ScenarioError("scenario: no equilibrium found (residual " +
                            csv_number(eq.residual_inf) + ")");
    }
    if (slack >= 0) {
        sc.spec = with_gov_p_ref(sc.spec, slack, eq.slack_p_ref);
        sys = CompositeSystem(sc.spec);
    }
    return std::move(eq.x);
}

[[nodiscard]] bool has_transmission_line(const CompositeSystem& sys) {
    for (int ci = 0; ci < sys.component_count(); ++ci) {
        if (sys.component(ci).role() == ComponentRole::transmission_line) return true;
    }
    return false;
}

int cmd_run(const CommonArgs& a) {
    Scenario sc = load_scenario(a.scenario);
    if (a.step) sc.sim.step = *a.step;
    if (a.t_end) sc.sim.t_end = *a.t_end;
    if (a.disturbance_mag) apply_disturbance_override(sc, *a.disturbance_mag);
    apply_support_overrides(sc, a);
    if (a.with_q_support) enable_support(sc);

    fs::create_directories(a.out_dir);
    CompositeSystem sys(sc.spec);
    const std::vector<double> x0 = prepare_initial_state(sc, sys);
    const Trace trace = simulate(sys, x0, sc.schedule, sc.sim);

    const fs::path out(a.out_dir);
    write_trace_csv((out / "trace.csv").string(), sys, trace);
    if (has_transmission_line(sys)) {
        write_loadability_csv((out / "loadability.csv").string(),
                              loadability_report(sys, trace));
    }
    std::printf("run: %zu samples to t=%s -> %s\n", trace.samples(),
                csv_number(trace.end_time).c_str(), out.string().c_str());
    if (trace.diverged) {
        std::fprintf(stderr, "run: state diverged at t=%s; partial trace retained\n",
                     csv_number(trace.end_time).c_str());
        return kExitDiverged;
    }
    return kExitOk;
}

int cmd_pv_sweep(const CommonArgs& a, std::optional<double> line_l, int parallel) {
    Scenario sc = load_scenario(a.scenario);
    if (sc.analysis.load_component.empty() || sc.analysis.slack_machine.empty()) {
        throw ScenarioError(
            "scenario: analysis.load_component and analysis.slack_machine are required "
            "for pv-sweep");
    }
    if (sc.analysis.r_grid.count == 0) {
        throw ScenarioError("scenario: analysis.r_grid is required for pv-sweep");
    }
    if (line_l) apply_line_inductance(sc, *line_l);
    apply_support_overrides(sc, a);
    if (a.disturbance_mag) sc.analysis.disturbance.magnitude = *a.disturbance_mag;

    PVSweepOptions opt;
    opt.load_component = sc.analysis.load_component;
    opt.slack_component = sc.analysis.slack_machine;
    opt.r_grid = sc.analysis.r_grid.values();
    opt.disturbance = sc.analysis.disturbance;
    opt.t_end = a.t_end ? *a.t_end : sc.analysis.sweep_t_end;
    opt.step = a.step ? *a.step : sc.sim.step;
    opt.record_interval = sc.sim.record_interval;
    opt.with_support = a.with_q_support;
    opt.stability = sc.analysis.stability;
    opt.threads = parallel;

    const std::vector<PVPoint> points = pv_sweep(sc.spec, opt);
    fs::create_directories(a.out_dir);
    const fs::path out(a.out_dir);
    write_pv_csv((out / "pv.csv").string(), points);

    int stable = 0, unstable = 0, infeasible = 0;
    for (const PVPoint& pt : points) {
        if (!pt.feasible) {
            ++infeasible;
        } else if (pt.stable) {
            ++stable;
        } else {
            ++unstable;
        }
    }
    const MaxPowerPoint mp = max_power_point(points);
    char table[512];
    std::snprintf(table, sizeof(table),
                  "%-24s %-10s %-10s %-12s %-10s %-10s %7s %9s %10s\n"
                  "%-24s %-10s %-10.4g %-12.6g %-10.6g %-10.6g %7d %9d %10d\n",
                  "scenario", "q_support", "line_l", "max_p", "v_at_max", "r_at_max", "stable",
                  "unstable", "infeasible", sc.name.empty() ? "(unnamed)" : sc.name.c_str(),
                  a.with_q_support ? "yes" : "no", line_inductance(sc), mp.p, mp.v, mp.r, stable,
                  unstable, infeasible);
    std::printf("%s", table);
    std::FILE* f = std::fopen((out / "summary.txt").string().c_str(), "w");
    if (f != nullptr) {
        std::fputs(table, f);
        std::fclose(f);
    }
    return kExitOk;
}

int cmd_inertia_demo(const CommonArgs& a, double j_high, double j_low) {
    Scenario base = load_scenario(a.scenario);
    if (a.step) base.sim.step = *a.step;
    if (a.t_end) base.sim.t_end = *a.t_end;
    if (a.disturbance_mag) apply_disturbance_override(base, *a.disturbance_mag);
    if (base.analysis.spectrum.component.empty()) {
        throw ScenarioError("scenario: analysis.spectrum.component is required for inertia-demo");
    }
    if (j_high == j_low) {
        log::warn("inertia-demo: equal inertia values; both runs will be identical");
    }

    fs::create_directories(a.out_dir);
    const fs::path out(a.out_dir);
    std::FILE* f = std::fopen((out / "in_band.txt").string().c_str(), "w");
    if (f == nullptr) throw ScenarioError("cannot write '" + (out / "in_band.txt").string() + "'");

    int rc = kExitOk;
    const struct {
        double j;
        const char* tag;
    } passes[] = {{j_high, "high"}, {j_low, "low"}};
    for (const auto& pass : passes) {
        Scenario sc = base;
        for (auto& c : sc.spec.components) {
            if (auto* m = std::get_if<MachineParams>(&c.params)) m->inertia_j = pass.j;
        }
        CompositeSystem sys(sc.spec);
        const std::vector<double> x0 = prepare_initial_state(sc, sys);
        const Trace trace = simulate(sys, x0, sc.schedule, sc.sim);
        write_trace_csv((out / (std::string("trace_") + pass.tag + ".csv")).string(), sys, trace);
        if (trace.diverged) {
            std::fprintf(stderr, "inertia-demo: J=%g run diverged at t=%s\n", pass.j,
                         csv_number(trace.end_time).c_str());
            rc = kExitDiverged;
            continue;
        }
        const Spectrum sp = line_power_spectrum(sys, trace, sc.analysis.spectrum.component,
                                                sc.analysis.spectrum.window_start,
                                                sc.analysis.spectrum.band_center_hz,
                                                sc.analysis.spectrum.band_half_width_hz);
        write_spectrum_csv((out / (std::string("spectrum_") + pass.tag + ".csv")).string(), sp);
        std::printf("inertia-demo: J=%-8g in-band fraction %.6f (band %g..%g Hz)\n", pass.j,
                    sp.in_band_fraction, sp.band_lo_hz, sp.band_hi_hz);
        std::fprintf(f, "j=%g in_band_fraction=%s band_lo_hz=%g band_hi_hz=%g\n", pass.j,
                     csv_number(sp.in_band_fraction).c_str(), sp.band_lo_hz, sp.band_hi_hz);
    }
    std::fclose(f);
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridemt: dynamic grid simulation with energy-based loadability analysis"};
    app.require_subcommand(1);

    CommonArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Simulate a scenario and write trace CSVs");
    add_common_flags(*run, run_args);

    CommonArgs pv_args;
    std::optional<double> line_l;
    int parallel = static_cast<int>(std::thread::hardware_concurrency());
    if (parallel < 1) parallel = 1;
    CLI::App* pv = app.add_subcommand("pv-sweep", "Sweep load resistance and classify stability");
    add_common_flags(*pv, pv_args);
    pv->add_option("--line-inductance", line_l, "Line inductance override (p.u.)");
    pv->add_option("--parallel", parallel, "Worker thread count");

    CommonArgs inertia_args;
    double j_high = 100.0;
    double j_low = 1.0;
    CLI::App* demo =
        app.add_subcommand("inertia-demo", "Compare line-power spectra at two inertia levels");
    add_common_flags(*demo, inertia_args);
    demo->add_option("--j-high", j_high, "High inertia constant");
    demo->add_option("--j-low", j_low, "Low inertia constant");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (pv->parsed()) return cmd_pv_sweep(pv_args, line_l, parallel);
        if (demo->parsed()) return cmd_inertia_demo(inertia_args, j_high, j_low);
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitValidation;
    }
    return kExitValidation;
}
