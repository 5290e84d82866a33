#include "gridemt/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <variant>

#include "gridemt/integrator.hpp"
#include "gridemt/log.hpp"

namespace gridemt {

namespace {

std::size_t spec_index(const SystemSpec& spec, const std::string& name) {
    for (std::size_t i = 0; i < spec.components.size(); ++i) {
        if (spec.components[i].name == name) return i;
    }
    throw std::invalid_argument("sweep: unknown component '" + name + "'");
}

} // namespace

SystemSpec with_load_resistance(SystemSpec spec, const std::string& component, double r) {
    auto& params = spec.components[spec_index(spec, component)].params;
    auto* load = std::get_if<RLLoadParams>(&params);
    if (load == nullptr) {
        throw std::invalid_argument("sweep: component '" + component + "' is not an RL load");
    }
    load->r = r;
    return spec;
}

SystemSpec with_machine_inertia(SystemSpec spec, const std::string& component, double j) {
    auto& params = spec.components[spec_index(spec, component)].params;
    auto* machine = std::get_if<MachineParams>(&params);
    if (machine == nullptr) {
        throw std::invalid_argument("sweep: component '" + component + "' is not a machine");
    }
    machine->inertia_j = j;
    return spec;
}

SystemSpec with_pq_tracking(SystemSpec spec, const std::string& component, double tau,
                            double q_set) {
    auto& params = spec.components[spec_index(spec, component)].params;
    auto* pq = std::get_if<PQSourceParams>(&params);
    if (pq == nullptr) {
        throw std::invalid_argument("sweep: component '" + component + "' is not a PQ source");
    }
    pq->tau_p = tau;
    pq->tau_q = tau;
    pq->q_set = q_set;
    return spec;
}

std::vector<PVPoint> pv_sweep(const SystemSpec& base, const PVSweepOptions& opt) {
    const std::size_t n = opt.r_grid.size();
    if (n == 0) throw std::invalid_argument("sweep: empty resistance grid");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(opt.r_grid[i] > 0.0)) {
            throw std::invalid_argument("sweep: resistances must be positive");
        }
        if (i > 0 && !(opt.r_grid[i] < opt.r_grid[i - 1])) {
            throw std::invalid_argument("sweep: resistance grid must be strictly decreasing");
        }
    }
    const auto slack = static_cast<int>(spec_index(base, opt.slack_component));

    Exogenous exo{};
    exo.pq_enabled = opt.with_support;

    std::vector<PVPoint> points(n);
    std::vector<SystemSpec> run_specs;
    std::vector<std::vector<double>> x0s(n);
    run_specs.reserve(n);

    // Continuation: each converged equilibrium seeds the next grid point, so
    // the solver follows one curve through the fold instead of jumping branches.
    std::vector<double> guess;
    double p_ref_prev = 0.0;
    bool have_prev = false;
    for (std::size_t i = 0; i < n; ++i) {
        SystemSpec spec = with_load_resistance(base, opt.load_component, opt.r_grid[i]);
        if (have_prev) spec = with_gov_p_ref(spec, slack, p_ref_prev);
        if (!have_prev) guess = flat_start(CompositeSystem(spec));
        auto res = find_equilibrium(spec, slack, exo, guess);
        PVPoint& pt = points[i];
        pt.r_load = opt.r_grid[i];
        pt.feasible = res.converged;
        if (res.converged) {
            guess = res.x;
            p_ref_prev = res.slack_p_ref;
            have_prev = true;
            x0s[i] = std::move(res.x);
            run_specs.push_back(with_gov_p_ref(spec, slack, p_ref_prev));
        } else {
            log::warn("sweep: no equilibrium at R=%g (residual %g)", opt.r_grid[i],
                      res.residual_inf);
            run_specs.push_back(std::move(spec));
        }
    }

    const double window_start = opt.disturbance.start + opt.disturbance.duration;
    auto run_point = [&](std::size_t i) {
        PVPoint& pt = points[i];
        if (!pt.feasible) return;
        try {
            CompositeSystem sys(run_specs[i]);
            Exogenous pulsed = exo;
            pulsed.exciter_ref_offset = opt.disturbance.magnitude;
            Schedule sched;
            sched.initial = exo;
            sched.events = {{opt.disturbance.start, pulsed}, {window_start, exo}};
            SimOptions so;
            so.t_end = opt.t_end;
            so.step = opt.step;
            so.record_interval = opt.record_interval;
            Trace tr = simulate(sys, x0s[i], sched, so);

            const int li = sys.find_component(opt.load_component);
            const PortVariables& pv = tr.port_row(0)[static_cast<std::size_t>(sys.port_offset(li))];
            pt.v_load = magnitude(pv.e);
            pt.p_load = port_power(pv);
            pt.diverged = tr.diverged;
            const StabilityVerdict v = classify_stability(tr, x0s[i], window_start, opt.stability);
            pt.stable = v == StabilityVerdict::stable;
            pt.inconclusive = v == StabilityVerdict::inconclusive;
        } catch (const std::exception& ex) {
            log::warn("sweep: run at R=%g failed: %s", pt.r_load, ex.what());
            pt.stable = false;
            pt.diverged = true;
        }
    };

    int threads = std::clamp(opt.threads, 1, static_cast<int>(n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) run_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                    run_point(i);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    label_branches(points);
    return points;
}

void label_branches(std::span<PVPoint> points) {
    const PVPoint* nose = nullptr;
    for (const auto& pt : points) {
        if (pt.feasible && (nose == nullptr || pt.p_load > nose->p_load)) nose = &pt;
    }
    if (nose == nullptr) return;
    for (auto& pt : points) {
        if (!pt.feasible) continue;
        pt.branch = pt.v_load >= nose->v_load ? 'H' : 'L';
    }
}

MaxPowerPoint max_power_point(std::span<const PVPoint> points) {
    std::vector<const PVPoint*> stable;
    for (const auto& pt : points) {
        if (pt.feasible && pt.stable) stable.push_back(&pt);
    }
    MaxPowerPoint out;
    if (stable.empty()) return out;
    std::sort(stable.begin(), stable.end(),
              [](const PVPoint* a, const PVPoint* b) { return a->p_load > b->p_load; });
    out = {stable[0]->p_load, stable[0]->r_load, stable[0]->v_load, true};
    if (stable.size() < 3) return out;

    // Newton divided differences through the three highest-power samples; the
    // vertex refines the nose only when it falls inside their resistance hull.
    const double r0 = stable[0]->r_load, r1 = stable[1]->r_load, r2 = stable[2]->r_load;
    const double p0 = stable[0]->p_load, p1 = stable[1]->p_load, p2 = stable[2]->p_load;
    const double d01 = (p1 - p0) / (r1 - r0);
    const double d12 = (p2 - p1) / (r2 - r1);
    const double a = (d12 - d01) / (r2 - r0);
    if (!(a < 0.0)) return out;
    const double rv = 0.5 * (r0 + r1 - d01 / a);
    if (!(rv >= std::min({r0, r1, r2}) && rv <= std::max({r0, r1, r2}))) return out;
    out.r = rv;
    out.p = p0 + d01 * (rv - r0) + a * (rv - r0) * (rv - r1);
    const double e01 = (stable[1]->v_load - stable[0]->v_load) / (r1 - r0);
    const double e12 = (stable[2]->v_load - stable[1]->v_load) / (r2 - r1);
    const double b = (e12 - e01) / (r2 - r0);
    out.v = stable[0]->v_load + e01 * (rv - r0) + b * (rv - r0) * (rv - r1);
    return out;
}

} // namespace gridemt
