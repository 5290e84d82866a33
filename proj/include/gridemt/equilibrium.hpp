#pragma once

#include <vector>

#include "gridemt/composite.hpp"

namespace gridemt {

// =============================================================================
// Equilibrium solving
// =============================================================================
//
// Damped Newton on the flat right-hand side f(x) = 0 with a finite-difference
// Jacobian. A synchronous-frame network with machines has a rotational gauge
// freedom (every machine angle can shift together) and a power-balance
// consistency condition (governor references must sum to load plus losses at
// zero speed deviation). Both are resolved by designating one slack machine:
// its rotor angle is pinned to the guess value and its governor power
// reference becomes a free unknown instead.
//
// Systems without machines (phase pinned by a source) solve plainly with
// slack_machine = -1.

struct EquilibriumOptions {
    int max_iterations = 60;
    double tolerance = 1e-9;     ///< required max |f_i|
    double fd_step = 1e-7;       ///< Jacobian perturbation scale
    int max_halvings = 30;       ///< damping line-search depth
};

struct EquilibriumResult {
    std::vector<double> x;
    double slack_p_ref = 0.0;    ///< solved governor reference (slack machine only)
    bool converged = false;
    double residual_inf = 0.0;
    int iterations = 0;
};

/// Returns a copy of the spec with the given machine's governor reference
/// replaced, so a solved equilibrium can be baked in before simulating.
[[nodiscard]] SystemSpec with_gov_p_ref(SystemSpec spec, int machine_index, double p_ref);

/// Solves f(x) = 0 for the system built from `spec` under `exo`.
/// `slack_machine` is a component index of a Machine, or -1 for none.
[[nodiscard]] EquilibriumResult find_equilibrium(const SystemSpec& spec, int slack_machine,
                                                 const Exogenous& exo,
                                                 std::span<const double> x_guess,
                                                 const EquilibriumOptions& opt = {});

/// Flat-start guess: unit bus voltages on the q axis, currents at zero,
/// machines at their no-load state.
[[nodiscard]] std::vector<double> flat_start(const CompositeSystem& sys, double v_mag = 1.0);

} // namespace gridemt
