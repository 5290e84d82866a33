#pragma once

#include <stdexcept>

#include "gridemt/component.hpp"

namespace gridemt {

// =============================================================================
// EMF source behind a series RL branch
// =============================================================================
//
// Ideal internal voltage (fixed dq phasor) feeding the network through a
// series R-L. The simplest generator stand-in; used by consistency networks
// and as a stiff source in tests. Exciter-ref-step events scale the EMF
// magnitude, mirroring the machine's disturbance input. States: [i_d, i_q],
// current flowing out of the source into the bus.

struct EmfSourceParams {
    double e_d;  ///< internal EMF, d component (p.u.)
    double e_q;  ///< internal EMF, q component (p.u.)
    double r;    ///< series resistance (p.u.), > 0
    double l;    ///< series inductance (p.u.), > 0
};

class EmfSource final : public Component {
public:
    EmfSource(const EmfSourceParams& p, const Frame& frame);

    [[nodiscard]] std::string_view type_name() const override { return "emf_source"; }
    [[nodiscard]] ComponentRole role() const override { return ComponentRole::generator; }
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
                                                 const Exogenous&) const override;
    [[nodiscard]] double nominal_time_constant() const override;

    [[nodiscard]] const EmfSourceParams& params() const { return p_; }

private:
    [[nodiscard]] Dq emf(const Exogenous& exo) const {
        return {p_.e_d * (1.0 + exo.exciter_ref_offset), p_.e_q * (1.0 + exo.exciter_ref_offset)};
    }

    EmfSourceParams p_;
    Frame frame_;
};

} // namespace gridemt
