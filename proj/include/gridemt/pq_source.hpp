#pragma once

#include <stdexcept>

#include "gridemt/component.hpp"

namespace gridemt {

// =============================================================================
// PQ source (grid-following power device)
// =============================================================================
//
// Current injection steering the power delivered at its port toward
// setpoints with first-order tracking:
//
//   dP/dt = -(P - P0)/tau_p        dQ/dt = -(Q - Q0)/tau_q
//
// P and Q are the powers measured at the port (flow-into-port convention),
// so a device *supplying* reactive power runs with q_set < 0. Internally the
// device slews current-amplitude states (components along and across the bus
// voltage) with the measured power-tracking error, which realizes the law
// above exactly at a stationary bus and up to a (dv/dt / v) parasitic while
// the bus voltage moves; the time constants therefore set the closed-loop
// control bandwidth, not just a setpoint ramp. The slew normalization uses a
// low-pass measurement of the voltage magnitude (time constant tau_v), and
// above the control bandwidth the injection degenerates to a direction-
// following constant-magnitude current, which keeps the device from pumping
// the bus LC resonance. Magnitude divisions are floored at `v_floor` to keep
// the injection bounded near a collapsed bus. The device is inert (zero
// states, zero flow) until enabled by an exogenous switch. Counted with the
// generators in boundary bookkeeping.

struct PQSourceParams {
    double p_set;           ///< real-power setpoint into the port (p.u.)
    double q_set;           ///< reactive-power setpoint into the port (p.u.)
    double tau_p;           ///< real-power tracking constant (s), > 0
    double tau_q;           ///< reactive-power tracking constant (s), > 0
    double v_floor = 1e-2;  ///< voltage-magnitude floor (p.u.), > 0
    double tau_v = 2e-3;    ///< voltage-measurement filter constant (s), > 0
};

class PQSource final : public Component {
public:
    PQSource(const PQSourceParams& p, const Frame& frame);

    [[nodiscard]] std::string_view type_name() const override { return "pq_source"; }
    [[nodiscard]] ComponentRole role() const override { return ComponentRole::pq_source; }
    [[nodiscard]] int state_dim() const override { return 3; }
    [[nodiscard]] int port_count() const override { return 1; }
    [[nodiscard]] PortKind port_kind(int) const override { return PortKind::current_injection; }
    [[nodiscard]] std::string_view state_name(int i) const override {
        return i == 0 ? "i_p" : (i == 1 ? "i_q" : "v_meas");
    }

    void flat_start(std::span<double> x, double v_mag) const override;

    void port_flows(std::span<const double> x, std::span<const Dq> efforts, const Exogenous& exo,
                    double t, std::span<Dq> flows) const override;
    void derivative(std::span<const double> x, std::span<const PortSignal> inputs,
                    const Exogenous& exo, double t, std::span<double> dx) const override;
    void port_records(std::span<const double> x, std::span<const double> dx,
                      std::span<const Dq> efforts, std::span<const Dq> effort_rates,
                      std::span<const Dq> flows, std::span<const Dq> flow_rates,
                      const Exogenous& exo, double t, std::span<PortVariables> out) const override;

    [[nodiscard]] Eigen::MatrixXd inertia_metric(std::span<const double>) const override;
    [[nodiscard]] Eigen::MatrixXd damping_metric(std::span<const double>,
                                                 const Exogenous&) const override;
    [[nodiscard]] double nominal_time_constant() const override { return p_.tau_q; }

    [[nodiscard]] const PQSourceParams& params() const { return p_; }

    /// Injection current for amplitude pair (i_p along e, i_q across e) at
    /// effort e, with the floor applied to the magnitude normalization.
    [[nodiscard]] Dq injection(double i_p, double i_q, const Dq& e) const;

private:
    PQSourceParams p_;
    Frame frame_;
};

} // namespace gridemt
