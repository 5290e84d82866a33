#pragma once

#include <stdexcept>

#include "gridemt/component.hpp"

namespace gridemt {

// =============================================================================
// Series RL load
// =============================================================================
//
// One-port dynamic load: series resistance and inductance, drawing current
// from its bus. States are the dq current into the load. The `load-step`
// event scales R by exogenous `load_scale`.

struct RLLoadParams {
    double r;  ///< series resistance (p.u.), >= 0
    double l;  ///< series inductance (p.u.), > 0
};

class RLLoad final : public Component {
public:
    RLLoad(const RLLoadParams& p, const Frame& frame);

    [[nodiscard]] std::string_view type_name() const override { return "rl_load"; }
    [[nodiscard]] ComponentRole role() const override { return ComponentRole::load; }
    [[nodiscard]] int state_dim() const override { return 2; }
    [[nodiscard]] int port_count() const override { return 1; }
    [[nodiscard]] PortKind port_kind(int) const override { return PortKind::current_injection; }
    [[nodiscard]] std::string_view state_name(int i) const override {
        return i == 0 ? "i_d" : "i_q";
    }

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
                                                 const Exogenous& exo) const override;
    [[nodiscard]] double nominal_time_constant() const override;

    [[nodiscard]] const RLLoadParams& params() const { return p_; }

private:
    RLLoadParams p_;
    Frame frame_;
};

} // namespace gridemt
