#pragma once

#include <functional>
#include <vector>

#include "gridemt/composite.hpp"
#include "gridemt/energy.hpp"

namespace gridemt {

// =============================================================================
// Time integration
// =============================================================================
//
// Fixed-step classical RK4 (default) and adaptive Dormand-Prince RK45 over a
// piecewise-constant exogenous schedule. Event times are hit exactly: the
// time axis is split at every event and record time, and each sub-interval is
// integrated independently, so no step ever straddles a discontinuity and
// every event is applied exactly once. Integration is deterministic: the same
// inputs produce bit-identical trajectories.

enum class Method { rk4, rk45 };

/// One exogenous switch: `exogenous` applies from `time` onward.
struct Event {
    double time = 0.0;
    Exogenous exogenous{};
};

/// Piecewise-constant exogenous input, left-closed at event times.
struct Schedule {
    Exogenous initial{};
    std::vector<Event> events;  ///< strictly increasing times

    [[nodiscard]] const Exogenous& at(double t) const;
};

struct SimOptions {
    double t_end = 1.0;
    double step = 50e-6;              ///< RK4 step / initial RK45 step (s)
    Method method = Method::rk4;
    double rel_tol = 1e-8;            ///< RK45 relative tolerance
    double abs_tol = 1e-10;           ///< RK45 absolute tolerance
    double record_interval = 0.0;     ///< sample spacing (s); 0 records every step
    double divergence_limit = 1e3;    ///< abort when any |x_i| exceeds this
};

using Rhs =
    std::function<void(double, std::span<const double>, const Exogenous&, std::span<double>)>;
/// Called at record times with (t, x, dx, exogenous-in-effect).
using Observer =
    std::function<void(double, std::span<const double>, std::span<const double>, const Exogenous&)>;

struct IntegrationReport {
    bool diverged = false;
    double end_time = 0.0;
    long long steps = 0;
    long long rejected = 0;  ///< RK45 error-controlled retries
};

/// Drives `x` from t = 0 to opt.t_end. The observer fires at t = 0, at every
/// record point, and at the final time; it never fires on a diverged state.
IntegrationReport integrate(const Rhs& rhs, std::span<double> x, const Schedule& schedule,
                            const SimOptions& opt, const Observer& observe);

// -----------------------------------------------------------------------------
// Recorded trace over a composite system
// -----------------------------------------------------------------------------

/// Sample-major recording of states, analytic port records, and per-component
/// energy snapshots.
struct Trace {
    int state_dim = 0;
    int port_count = 0;
    int component_count = 0;
    std::vector<double> times;
    std::vector<double> states;
    std::vector<PortVariables> ports;
    std::vector<EnergySnapshot> energy;
    bool diverged = false;
    double end_time = 0.0;

    [[nodiscard]] std::size_t samples() const { return times.size(); }
    [[nodiscard]] std::span<const double> state(std::size_t k) const {
        return {states.data() + k * static_cast<std::size_t>(state_dim),
                static_cast<std::size_t>(state_dim)};
    }
    [[nodiscard]] std::span<const PortVariables> port_row(std::size_t k) const {
        return {ports.data() + k * static_cast<std::size_t>(port_count),
                static_cast<std::size_t>(port_count)};
    }
    [[nodiscard]] std::span<const EnergySnapshot> energy_row(std::size_t k) const {
        return {energy.data() + k * static_cast<std::size_t>(component_count),
                static_cast<std::size_t>(component_count)};
    }
};

/// Integrates the composite system and records the full energy-layer trace.
[[nodiscard]] Trace simulate(const CompositeSystem& sys, std::span<const double> x0,
                             const Schedule& schedule, const SimOptions& opt);

} // namespace gridemt
