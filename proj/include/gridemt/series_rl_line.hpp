#pragma once

#include <stdexcept>

#include "gridemt/component.hpp"

namespace gridemt {

// =============================================================================
// Series RL transmission branch
// =============================================================================
//
// Two-port line without shunt capacitance: a pure R-L branch between two
// buses, both ports current injections (the buses must get their capacitance
// from other components, e.g. shunt_rc). For this element the tangent-energy
// identity and the boundary form of the storage rate are exact, which is why
// the dissipativity consistency checks run on networks built from it.
// States: [i_d, i_q], current flowing from port 0 to port 1.

struct SeriesRLLineParams {
    double r;  ///< series resistance (p.u.), > 0
    double l;  ///< series inductance (p.u.), > 0
};

class SeriesRLLine final : public Component {
public:
    SeriesRLLine(const SeriesRLLineParams& p, const Frame& frame);

    [[nodiscard]] std::string_view type_name() const override { return "series_rl_line"; }
    [[nodiscard]] ComponentRole role() const override { return ComponentRole::transmission_line; }
    [[nodiscard]] int state_dim() const override { return 2; }
    [[nodiscard]] int port_count() const override { return 2; }
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
                                                 const Exogenous&) const override;
    [[nodiscard]] double nominal_time_constant() const override;

    [[nodiscard]] const SeriesRLLineParams& params() const { return p_; }

private:
    SeriesRLLineParams p_;
    Frame frame_;
};

} // namespace gridemt
