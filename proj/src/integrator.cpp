#include "gridemt/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gridemt/log.hpp"

namespace gridemt {

namespace {

bool state_ok(std::span<const double> x, double limit) {
    for (double v : x) {
        if (!std::isfinite(v) || std::abs(v) > limit) {
            return false;
        }
    }
    return true;
}

class Stepper {
public:
    explicit Stepper(std::size_t n)
        : k1_(n), k2_(n), k3_(n), k4_(n), k5_(n), k6_(n), k7_(n), tmp_(n), err_(n) {}

    void rk4(const Rhs& rhs, double t, double h, std::span<double> x, const Exogenous& exo) {
        const std::size_t n = x.size();
        rhs(t, x, exo, k1_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * h * k1_[i];
        rhs(t + 0.5 * h, tmp_, exo, k2_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + 0.5 * h * k2_[i];
        rhs(t + 0.5 * h, tmp_, exo, k3_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * k3_[i];
        rhs(t + h, tmp_, exo, k4_);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        }
    }

    /// Dormand-Prince 5(4) trial step; fills the error estimate and the
    /// candidate state in tmp_. Returns the scaled error norm.
    double rk45_trial(const Rhs& rhs, double t, double h, std::span<const double> x,
                      const Exogenous& exo, double rel, double abs) {
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                                e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                                e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
        const std::size_t n = x.size();
        rhs(t, x, exo, k1_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * a21 * k1_[i];
        rhs(t + h / 5.0, tmp_, exo, k2_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = x[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        rhs(t + 3.0 * h / 10.0, tmp_, exo, k3_);
        for (std::size_t i = 0; i < n; ++i) {
            tmp_[i] = x[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        }
        rhs(t + 4.0 * h / 5.0, tmp_, exo, k4_);
        for (std::size_t i = 0; i < n; ++i) {
            tmp_[i] = x[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        }
        rhs(t + 8.0 * h / 9.0, tmp_, exo, k5_);
        for (std::size_t i = 0; i < n; ++i) {
            tmp_[i] = x[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                                  a65 * k5_[i]);
        }
        rhs(t + h, tmp_, exo, k6_);
        for (std::size_t i = 0; i < n; ++i) {
            tmp_[i] = x[i] +
                      h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] + b6 * k6_[i]);
        }
        rhs(t + h, tmp_, exo, k7_);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                                  e6 * k6_[i] + e7 * k7_[i]);
            const double scale = abs + rel * std::max(std::abs(x[i]), std::abs(tmp_[i]));
            err = std::max(err, std::abs(e) / scale);
        }
        return err;
    }

    std::span<double> candidate() { return tmp_; }

private:
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, err_;
};

} // namespace

const Exogenous& Schedule::at(double t) const {
    const Exogenous* cur = &initial;
    for (const Event& e : events) {
        if (e.time <= t) {
            cur = &e.exogenous;
        } else {
            break;
        }
    }
    return *cur;
}

IntegrationReport integrate(const Rhs& rhs, std::span<double> x, const Schedule& schedule,
                            const SimOptions& opt, const Observer& observe) {
    if (!(opt.t_end > 0.0) || !(opt.step > 0.0)) {
        throw std::invalid_argument("integrate: t_end and step must be > 0");
    }
    if (!(opt.record_interval >= 0.0)) {
        throw std::invalid_argument("integrate: record_interval must be >= 0");
    }
    for (std::size_t i = 1; i < schedule.events.size(); ++i) {
        if (!(schedule.events[i].time > schedule.events[i - 1].time)) {
            throw std::invalid_argument("integrate: event times must be strictly increasing");
        }
    }

    // boundary grid: record points plus event times, all hit exactly
    std::vector<double> bounds;
    if (opt.record_interval > 0.0) {
        const auto m = static_cast<long long>(std::floor(opt.t_end / opt.record_interval + 1e-9));
        bounds.reserve(static_cast<std::size_t>(m) + schedule.events.size() + 2);
        for (long long j = 1; j <= m; ++j) {
            bounds.push_back(static_cast<double>(j) * opt.record_interval);
        }
    }
    for (const Event& e : schedule.events) {
        if (e.time > 0.0 && e.time < opt.t_end) {
            bounds.push_back(e.time);
        }
    }
    bounds.push_back(opt.t_end);
    std::sort(bounds.begin(), bounds.end());
    bounds.erase(std::unique(bounds.begin(), bounds.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 bounds.end());

    const bool record_every_step = opt.record_interval == 0.0;
    auto is_record_point = [&](double t) {
        if (record_every_step) {
            return true;
        }
        const double r = t / opt.record_interval;
        return std::abs(r - std::round(r)) < 1e-6 || t == opt.t_end;
    };

    Stepper stepper(x.size());
    std::vector<double> dx_scratch(x.size());
    IntegrationReport rep;

    {
        const Exogenous& exo0 = schedule.at(0.0);
        rhs(0.0, x, exo0, dx_scratch);
        observe(0.0, x, dx_scratch, exo0);
    }

    double t = 0.0;
    double h45 = opt.step;
    for (double b : bounds) {
        const Exogenous& exo = schedule.at(t);
        if (opt.method == Method::rk4) {
            const double len = b - t;
            const auto m = static_cast<long long>(std::floor(len / opt.step + 1e-9));
            for (long long s = 0; s < m; ++s) {
                const double t0 = t + static_cast<double>(s) * opt.step;
                stepper.rk4(rhs, t0, opt.step, x, exo);
                ++rep.steps;
                if (!state_ok(x, opt.divergence_limit)) {
                    rep.diverged = true;
                    rep.end_time = t0 + opt.step;
                    return rep;
                }
                const double rem_after = len - static_cast<double>(s + 1) * opt.step;
                if (record_every_step && rem_after > 1e-12) {
                    const double tn = t0 + opt.step;
                    rhs(tn, x, exo, dx_scratch);
                    observe(tn, x, dx_scratch, exo);
                }
            }
            const double rem = len - static_cast<double>(m) * opt.step;
            if (rem > 1e-12) {
                stepper.rk4(rhs, t + static_cast<double>(m) * opt.step, rem, x, exo);
                ++rep.steps;
                if (!state_ok(x, opt.divergence_limit)) {
                    rep.diverged = true;
                    rep.end_time = b;
                    return rep;
                }
            }
        } else {
            double tc = t;
            while (tc < b - 1e-12) {
                double h = std::min(h45, b - tc);
                double err = stepper.rk45_trial(rhs, tc, h, x, exo, opt.rel_tol, opt.abs_tol);
                while (err > 1.0) {
                    ++rep.rejected;
                    h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
                    if (h < 1e-14) {
                        throw std::runtime_error("integrate: RK45 step size underflow");
                    }
                    err = stepper.rk45_trial(rhs, tc, h, x, exo, opt.rel_tol, opt.abs_tol);
                }
                std::copy(stepper.candidate().begin(), stepper.candidate().end(), x.begin());
                ++rep.steps;
                tc += h;
                h45 = h * std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
                if (!state_ok(x, opt.divergence_limit)) {
                    rep.diverged = true;
                    rep.end_time = tc;
                    return rep;
                }
                if (record_every_step && tc < b - 1e-12) {
                    rhs(tc, x, exo, dx_scratch);
                    observe(tc, x, dx_scratch, exo);
                }
            }
        }
        t = b;
        if (is_record_point(t)) {
            // records at event times use the exogenous block of the segment ahead
            const Exogenous& exo_now = schedule.at(t);
            rhs(t, x, exo_now, dx_scratch);
            observe(t, x, dx_scratch, exo_now);
        }
    }
    rep.end_time = t;
    return rep;
}

Trace simulate(const CompositeSystem& sys, std::span<const double> x0, const Schedule& schedule,
               const SimOptions& opt) {
    if (x0.size() != static_cast<std::size_t>(sys.state_dim())) {
        throw std::invalid_argument("simulate: initial state has wrong dimension");
    }
    Trace trace;
    trace.state_dim = sys.state_dim();
    trace.port_count = sys.total_port_count();
    trace.component_count = sys.component_count();

    std::vector<double> x(x0.begin(), x0.end());
    const Rhs rhs = [&sys](double t, std::span<const double> xs, const Exogenous& exo,
                           std::span<double> dxs) { sys.derivative(t, xs, exo, dxs); };

    const auto np = static_cast<std::size_t>(trace.port_count);
    const auto nc = static_cast<std::size_t>(trace.component_count);
    const Observer observer = [&](double t, std::span<const double> xs,
                                  std::span<const double> dxs, const Exogenous& exo) {
        trace.times.push_back(t);
        trace.states.insert(trace.states.end(), xs.begin(), xs.end());
        trace.ports.resize(trace.ports.size() + np);
        const std::span<PortVariables> row{trace.ports.data() + trace.ports.size() - np, np};
        sys.port_records(t, xs, dxs, exo, row);
        for (std::size_t ci = 0; ci < nc; ++ci) {
            const Component& c = sys.component(static_cast<int>(ci));
            const auto xc = sys.component_state(xs, static_cast<int>(ci));
            const auto dxc = sys.component_state(dxs, static_cast<int>(ci));
            const auto off = static_cast<std::size_t>(sys.port_offset(static_cast<int>(ci)));
            trace.energy.push_back(energy_snapshot(
                xc, dxc, row.subspan(off, static_cast<std::size_t>(c.port_count())),
                c.inertia_metric(xc), c.damping_metric(xc, exo), c.qdot_convention(),
                c.nominal_time_constant()));
        }
    };

    const IntegrationReport rep = integrate(rhs, x, schedule, opt, observer);
    trace.diverged = rep.diverged;
    trace.end_time = rep.end_time;
    if (rep.diverged) {
        log::info("simulate: state diverged at t=%.6f s", rep.end_time);
    }
    return trace;
}

} // namespace gridemt
