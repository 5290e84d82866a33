#pragma once

#include <stdexcept>

#include "gridemt/component.hpp"

namespace gridemt {

// =============================================================================
// Pi-model transmission line
// =============================================================================
//
// Lumped-parameter pi equivalent: series R-L between two shunt capacitors of
// C/2 each. Both ports are bus-voltage owners; the shunt voltages ARE the bus
// voltages of the two terminal buses. States:
//
//   [i_d, i_q, v1_d, v1_q, v2_d, v2_q]
//
// with i the series current flowing from port 1 (sending) to port 2
// (receiving). The line's time constant is that of its series branch, L/R.

struct PiLineParams {
    double r;  ///< series resistance (p.u.), > 0
    double l;  ///< series inductance (p.u.), > 0
    double c;  ///< total shunt capacitance (p.u.), > 0 (C/2 per end)
};

class PiLine final : public Component {
public:
    PiLine(const PiLineParams& p, const Frame& frame);

    [[nodiscard]] std::string_view type_name() const override { return "pi_line"; }
    [[nodiscard]] ComponentRole role() const override { return ComponentRole::transmission_line; }
    [[nodiscard]] int state_dim() const override { return 6; }
    [[nodiscard]] int port_count() const override { return 2; }
    [[nodiscard]] PortKind port_kind(int) const override { return PortKind::bus_voltage_owner; }
    [[nodiscard]] std::string_view state_name(int i) const override;

    [[nodiscard]] double shunt_capacitance(int) const override { return 0.5 * p_.c; }
    [[nodiscard]] Dq owned_effort(std::span<const double> x, int port) const override;
    [[nodiscard]] Dq shunt_draw(std::span<const double> x, int port) const override;
    [[nodiscard]] Dq shunt_draw_rate(std::span<const double> x, std::span<const double> dx,
                                     int port) const override;

    void derivative(std::span<const double> x, std::span<const PortSignal> inputs,
                    const Exogenous& exo, double t, std::span<double> dx) const override;

    [[nodiscard]] Eigen::MatrixXd inertia_metric(std::span<const double>) const override;
    [[nodiscard]] Eigen::MatrixXd damping_metric(std::span<const double>,
                                                 const Exogenous&) const override;
    [[nodiscard]] double nominal_time_constant() const override;

    void flat_start(std::span<double> x, double v_mag) const override;

    [[nodiscard]] const PiLineParams& params() const { return p_; }

private:
    PiLineParams p_;
    Frame frame_;
};

} // namespace gridemt
