#pragma once

#include <stdexcept>

#include "gridemt/component.hpp"

namespace gridemt {

// =============================================================================
// Shunt RC
// =============================================================================
//
// Bus capacitor with a parallel loss resistance. Provides bus capacitance on
// networks whose lines carry none (series RL branches) and models lossy
// compensation. Its single port owns the bus voltage; states [v_d, v_q].

struct ShuntRCParams {
    double c;           ///< shunt capacitance (p.u.), > 0
    double r_parallel;  ///< parallel resistance (p.u.), > 0
};

class ShuntRC final : public Component {
public:
    ShuntRC(const ShuntRCParams& p, const Frame& frame);

    [[nodiscard]] std::string_view type_name() const override { return "shunt_rc"; }
    [[nodiscard]] ComponentRole role() const override { return ComponentRole::load; }
    [[nodiscard]] int state_dim() const override { return 2; }
    [[nodiscard]] int port_count() const override { return 1; }
    [[nodiscard]] PortKind port_kind(int) const override { return PortKind::bus_voltage_owner; }
    [[nodiscard]] std::string_view state_name(int i) const override {
        return i == 0 ? "v_d" : "v_q";
    }
    [[nodiscard]] QdotConvention qdot_convention() const override {
        return QdotConvention::capacitive;
    }

    [[nodiscard]] double shunt_capacitance(int) const override { return p_.c; }
    [[nodiscard]] Dq owned_effort(std::span<const double> x, int) const override {
        return {x[0], x[1]};
    }
    [[nodiscard]] Dq shunt_draw(std::span<const double> x, int) const override {
        return {x[0] / p_.r_parallel, x[1] / p_.r_parallel};
    }
    [[nodiscard]] Dq shunt_draw_rate(std::span<const double>, std::span<const double> dx,
                                     int) const override {
        return {dx[0] / p_.r_parallel, dx[1] / p_.r_parallel};
    }

    void derivative(std::span<const double> x, std::span<const PortSignal> inputs,
                    const Exogenous& exo, double t, std::span<double> dx) const override;

    [[nodiscard]] Eigen::MatrixXd inertia_metric(std::span<const double>) const override;
    [[nodiscard]] Eigen::MatrixXd damping_metric(std::span<const double>,
                                                 const Exogenous&) const override;
    [[nodiscard]] double nominal_time_constant() const override;

    void flat_start(std::span<double> x, double v_mag) const override {
        x[0] = 0.0;
        x[1] = v_mag;
    }

    [[nodiscard]] const ShuntRCParams& params() const { return p_; }

private:
    ShuntRCParams p_;
    Frame frame_;
};

} // namespace gridemt
