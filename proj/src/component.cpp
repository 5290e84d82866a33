#include "gridemt/component.hpp"

#include <stdexcept>
#include <vector>

namespace gridemt {

Dq Component::owned_effort(std::span<const double>, int) const {
    throw std::logic_error("owned_effort called on a component without owner ports");
}

Dq Component::shunt_draw(std::span<const double>, int) const {
    return {};
}

Dq Component::shunt_draw_rate(std::span<const double>, std::span<const double>, int) const {
    return {};
}

void Component::port_flows(std::span<const double>, std::span<const Dq>, const Exogenous&, double,
                           std::span<Dq> flows) const {
    for (auto& f : flows) f = Dq{};
}

void Component::port_records(std::span<const double>, std::span<const double>,
                             std::span<const Dq> efforts, std::span<const Dq> effort_rates,
                             std::span<const Dq> flows, std::span<const Dq> flow_rates,
                             const Exogenous&, double, std::span<PortVariables> out) const {
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].e = efforts[i];
        out[i].de_dt = effort_rates[i];
        out[i].f = flows[i];
        out[i].df_dt = flow_rates[i];
    }
}

bool Component::is_lossless() const {
    // A component is lossless when its damping metric vanishes identically;
    // the metrics here are state-independent, so probing at the origin suffices.
    std::vector<double> zero(static_cast<std::size_t>(state_dim()), 0.0);
    return damping_metric(zero, Exogenous{}).isZero(0.0);
}

void Component::flat_start(std::span<double> x, double) const {
    for (auto& v : x) v = 0.0;
}

} // namespace gridemt
