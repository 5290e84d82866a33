#pragma once

#include <string>
#include <vector>

#include "gridemt/analysis.hpp"
#include "gridemt/equilibrium.hpp"

namespace gridemt {

// =============================================================================
// PV sweep
// =============================================================================
//
// Sweeps the load resistance across a descending grid (open circuit toward
// short circuit), tracing both branches of the PV curve: equilibria are
// continued point-to-point, so no fold is crossed in the sweep parameter.
// Each feasible equilibrium is then subjected to a small exciter-reference
// pulse and classified. Disturbance runs are independent jobs; results merge
// by grid index, so the output is identical for any thread count.

struct DisturbanceSpec {
    double start = 1.0;      ///< pulse onset (s)
    double duration = 0.1;   ///< pulse length (s)
    double magnitude = 0.01; ///< exciter reference offset (p.u.)
};

struct PVSweepOptions {
    std::string load_component;   ///< RL load whose resistance sweeps
    std::string slack_component;  ///< machine fixing the angle gauge
    std::vector<double> r_grid;   ///< descending resistances (p.u.)
    DisturbanceSpec disturbance{};
    double t_end = 6.0;           ///< run length per point (s)
    double step = 50e-6;
    double record_interval = 1e-3;
    bool with_support = false;    ///< PQ sources enabled throughout
    StabilityCriterion stability{};
    int threads = 1;
};

struct PVPoint {
    double r_load = 0.0;
    double v_load = 0.0;       ///< equilibrium load-bus voltage magnitude (p.u.)
    double p_load = 0.0;       ///< equilibrium load real power (p.u.)
    bool feasible = false;     ///< equilibrium solve converged
    bool stable = false;
    bool diverged = false;
    bool inconclusive = false;
    char branch = '?';         ///< 'H' above the nose voltage, 'L' below
};

struct MaxPowerPoint {
    double p = 0.0;
    double r = 0.0;
    double v = 0.0;
    bool valid = false;
};

/// Full sweep; `base` must contain the named load and slack components.
[[nodiscard]] std::vector<PVPoint> pv_sweep(const SystemSpec& base, const PVSweepOptions& opt);

/// Parabolic interpolation through the three highest-power stable samples.
[[nodiscard]] MaxPowerPoint max_power_point(std::span<const PVPoint> points);

/// Labels branches by comparing each voltage with the feasible-curve nose voltage.
void label_branches(std::span<PVPoint> points);

// -----------------------------------------------------------------------------
// Spec editing helpers for sweeps and experiment runners
// -----------------------------------------------------------------------------

[[nodiscard]] SystemSpec with_load_resistance(SystemSpec spec, const std::string& component,
                                              double r);
[[nodiscard]] SystemSpec with_machine_inertia(SystemSpec spec, const std::string& component,
                                              double j);
[[nodiscard]] SystemSpec with_pq_tracking(SystemSpec spec, const std::string& component,
                                          double tau, double q_set);

} // namespace gridemt
