#pragma once

#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "gridemt/port.hpp"

namespace gridemt {

// =============================================================================
// Component model
// =============================================================================
//
// A component is an ODE system x' = f(x, ports, exogenous, t) together with
// two constant-sign quadratic metrics over its state:
//
//   inertia metric H:  stored energy        E  = 1/2 x^T H x      (p.u.-s)
//   damping metric B:  dissipated power     D  = 1/2 x^T B x      (p.u.)
//
// B is defined so that D is the TOTAL instantaneous dissipated power (R i^2
// for a resistor), which makes dE/dt = sum(port powers) - D exact for
// port-only components. Tangent energy is E_t = 1/2 x'^T H x'.
//
// Ports come in two kinds. A `bus_voltage_owner` port contributes shunt
// capacitance to its bus; the bus voltage IS one of the component's state
// pairs, and the network hands the component its port inflow. A
// `current_injection` port reads the bus voltage and produces a flow. Every
// bus must have at least one owner port; this is what keeps the composite
// system a pure ODE.

enum class PortKind { bus_voltage_owner, current_injection };

enum class ComponentRole { generator, transmission_line, load, pq_source };

/// Rotating-frame description shared by all components of one network.
/// omega_pu = 1 is the synchronous frame; omega_pu = 0 gives a stationary
/// ("dc") frame in which cross-axis coupling vanishes.
struct Frame {
    double omega_base;      ///< electrical base speed (rad/s)
    double omega_pu = 1.0;  ///< frame speed in p.u. of omega_base
};

/// Event-driven inputs, piecewise constant between event boundaries.
struct Exogenous {
    double exciter_ref_offset = 0.0;  ///< added to the exciter voltage reference
    double load_scale = 1.0;          ///< multiplies load resistance
    bool pq_enabled = false;          ///< PQ source tracking enabled
};

/// Per-port input handed to Component::derivative.
///   current_injection ports: `value` = bus effort (voltage).
///   bus_voltage_owner ports: `value` = flow into the port (current).
struct PortSignal {
    Dq value;
};

class Component {
public:
    virtual ~Component() = default;

    [[nodiscard]] virtual std::string_view type_name() const = 0;
    [[nodiscard]] virtual ComponentRole role() const = 0;
    [[nodiscard]] virtual int state_dim() const = 0;
    [[nodiscard]] virtual int port_count() const = 0;
    [[nodiscard]] virtual PortKind port_kind(int port) const = 0;
    [[nodiscard]] virtual std::string_view state_name(int i) const = 0;
    [[nodiscard]] virtual QdotConvention qdot_convention() const { return QdotConvention::inductive; }

    // -------------------------------------------------------------------------
    // Owner-port plumbing (only called for bus_voltage_owner ports)
    // -------------------------------------------------------------------------

    /// Shunt capacitance contributed to the port's bus (p.u.).
    [[nodiscard]] virtual double shunt_capacitance(int /*port*/) const { return 0.0; }

    /// Bus voltage published by an owner port (reads the component's state).
    [[nodiscard]] virtual Dq owned_effort(std::span<const double> x, int port) const;

    /// Current leaving the bus into the component, excluding the shunt
    /// capacitor itself (series branches, shunt conductances).
    [[nodiscard]] virtual Dq shunt_draw(std::span<const double> x, int port) const;

    /// Analytic d/dt of shunt_draw given the state derivative.
    [[nodiscard]] virtual Dq shunt_draw_rate(std::span<const double> x, std::span<const double> dx,
                                             int port) const;

    // -------------------------------------------------------------------------
    // Dynamics
    // -------------------------------------------------------------------------

    /// Flows of current_injection ports given bus efforts (owner ports get {0,0}).
    virtual void port_flows(std::span<const double> x, std::span<const Dq> efforts,
                            const Exogenous& exo, double t, std::span<Dq> flows) const;

    /// State derivative. `inputs[i]` is per PortSignal semantics for port i.
    virtual void derivative(std::span<const double> x, std::span<const PortSignal> inputs,
                            const Exogenous& exo, double t, std::span<double> dx) const = 0;

    /// Full analytic port records once the state derivative is known.
    /// `flows`/`flow_rates` carry the resolved port flows and their rates
    /// (for owner ports these come from Kirchhoff sums at the bus).
    virtual void port_records(std::span<const double> x, std::span<const double> dx,
                              std::span<const Dq> efforts, std::span<const Dq> effort_rates,
                              std::span<const Dq> flows, std::span<const Dq> flow_rates,
                              const Exogenous& exo, double t,
                              std::span<PortVariables> out) const;

    // -------------------------------------------------------------------------
    // Energy metrics
    // -------------------------------------------------------------------------

    /// Inertia metric H(x); symmetric PSD.
    [[nodiscard]] virtual Eigen::MatrixXd inertia_metric(std::span<const double> x) const = 0;

    /// Damping metric B(x); symmetric PSD, doubled so 1/2 x^T B x is total
    /// dissipated power. Takes the exogenous block so event-scaled resistances
    /// stay consistent with the dynamics.
    [[nodiscard]] virtual Eigen::MatrixXd damping_metric(std::span<const double> x,
                                                         const Exogenous& exo) const = 0;

    /// Parameter-level time constant 2E/D (L/R for a series RL branch), in seconds.
    /// Used as the snapshot fallback when the state carries no energy.
    [[nodiscard]] virtual double nominal_time_constant() const = 0;

    /// True when the component dissipates nothing for every state (H-storage only).
    [[nodiscard]] virtual bool is_lossless() const;

    /// Writes a flat-start guess for equilibrium solving: bus-voltage states
    /// at v_mag on the q axis, everything else at rest. Default: all zeros.
    virtual void flat_start(std::span<double> x, double v_mag) const;
};

} // namespace gridemt
