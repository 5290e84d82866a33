#pragma once

#include <array>
#include <stdexcept>

#include "gridemt/component.hpp"

namespace gridemt {

// =============================================================================
// Synchronous machine
// =============================================================================
//
// Full flux-linkage model with stator transients: two mechanical states, five
// winding fluxes (stator d/q, field, one damper per axis), a first-order
// governor and a two-stage exciter (voltage regulator lag feeding an exciter
// field lag). Ten states:
//
//   [delta, omega, psi_d, psi_q, psi_f, psi_kd, psi_kq, p_mech, v_r, e_fd]
//
// delta is the rotor angle relative to the rotating network frame, omega the
// speed deviation in p.u. Stator current is positive OUT of the machine
// (generator convention); the port flow is therefore minus the stator current
// rotated into the network frame.
//
// The regulator input is the load-compensated terminal voltage
// |e - (rc + j xc) i| with i the delivered current, so the regulated point can
// be placed inside the machine (xc > 0) or out into the network (xc < 0).
//
// Parameters use the standard-parameter set (synchronous/transient/
// subtransient reactances and open-circuit time constants); the classic
// synthesis formulas convert them to the fundamental coupled-circuit
// quantities. With one damper winding per axis the q-axis circuit is built
// from (x_q, x_q_st, t_q0_st); x_q_t and t_q0_t are validated for ordering
// but do not enter the circuit.

struct MachineParams {
    // stator and rotor electrical parameters (p.u., time constants in s)
    double r_s;      ///< stator resistance, >= 0
    double x_l;      ///< stator leakage reactance, > 0
    double x_d;      ///< d-axis synchronous reactance
    double x_q;      ///< q-axis synchronous reactance
    double x_d_t;    ///< d-axis transient reactance
    double x_q_t;    ///< q-axis transient reactance (ordering only)
    double x_d_st;   ///< d-axis subtransient reactance
    double x_q_st;   ///< q-axis subtransient reactance
    double t_d0_t;   ///< d-axis open-circuit transient time constant
    double t_q0_t;   ///< q-axis open-circuit transient time constant (ordering only)
    double t_d0_st;  ///< d-axis open-circuit subtransient time constant
    double t_q0_st;  ///< q-axis open-circuit subtransient time constant

    // mechanical + controls
    double inertia_j;   ///< rotor inertia constant (p.u.-s), > 0
    double damping_d;   ///< rotor damping torque coefficient (p.u.), >= 0
    double gov_k;       ///< governor droop gain (p.u. power per p.u. speed)
    double gov_t;       ///< governor time constant (s), > 0
    double gov_p_ref;   ///< governor power reference (p.u.)
    double exc_k;       ///< voltage regulator proportional gain
    double exc_t;       ///< voltage regulator time constant (s), > 0
    double exc_t2;      ///< exciter field time constant (s), > 0
    double exc_v_ref;   ///< exciter voltage reference (p.u.)
    double exc_rc = 0.0;  ///< load compensation resistance (p.u.)
    double exc_xc = 0.0;  ///< load compensation reactance (p.u.); negative
                          ///< values regulate a point into the network
};

/// Fundamental coupled-circuit quantities synthesized from MachineParams.
struct MachineCircuit {
    double l_ad, l_aq;        ///< mutual inductances
    double l_fl, l_kdl, l_kql;///< rotor leakage inductances
    double r_f, r_kd, r_kq;   ///< rotor resistances
};

class Machine final : public Component {
public:
    static constexpr int kDelta = 0, kOmega = 1, kPsiD = 2, kPsiQ = 3, kPsiF = 4, kPsiKd = 5,
                         kPsiKq = 6, kPMech = 7, kVr = 8, kEfd = 9;

    Machine(const MachineParams& p, const Frame& frame);

    [[nodiscard]] std::string_view type_name() const override { return "machine"; }
    [[nodiscard]] ComponentRole role() const override { return ComponentRole::generator; }
    [[nodiscard]] int state_dim() const override { return 10; }
    [[nodiscard]] int port_count() const override { return 1; }
    [[nodiscard]] PortKind port_kind(int) const override { return PortKind::current_injection; }
    [[nodiscard]] std::string_view state_name(int i) const override;

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
    [[nodiscard]] double nominal_time_constant() const override { return p_.t_d0_t; }

    [[nodiscard]] const MachineParams& params() const { return p_; }
    [[nodiscard]] const MachineCircuit& circuit() const { return c_; }

    /// Machine-frame winding currents from the flux states:
    /// (i_d, i_q) stator current out of the machine, (i_f, i_kd, i_kq) rotor.
    struct Currents {
        double i_d, i_q, i_f, i_kd, i_kq;
    };
    [[nodiscard]] Currents currents(std::span<const double> x) const;

    /// Electrical (air-gap) torque, generator convention.
    [[nodiscard]] double electrical_torque(std::span<const double> x) const;

    /// No-load equilibrium guess at the given terminal voltage magnitude.
    [[nodiscard]] std::array<double, 10> no_load_state(double v_mag) const;

    void flat_start(std::span<double> x, double v_mag) const override;

private:
    MachineParams p_;
    MachineCircuit c_;
    Frame frame_;
    Eigen::Matrix3d md_inv_;  ///< d-axis flux -> (-i_d, i_f, i_kd)
    Eigen::Matrix2d mq_inv_;  ///< q-axis flux -> (-i_q, i_kq)
    Eigen::MatrixXd h_;       ///< constant inertia metric
    Eigen::MatrixXd b_;       ///< constant damping metric
};

} // namespace gridemt
