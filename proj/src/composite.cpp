#include "gridemt/composite.hpp"

#include <stdexcept>

namespace gridemt {

std::unique_ptr<Component> make_component(const ComponentParams& params, const Frame& frame) {
    return std::visit(
        [&](const auto& p) -> std::unique_ptr<Component> {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, MachineParams>) {
                return std::make_unique<Machine>(p, frame);
            } else if constexpr (std::is_same_v<P, PiLineParams>) {
                return std::make_unique<PiLine>(p, frame);
            } else if constexpr (std::is_same_v<P, SeriesRLLineParams>) {
                return std::make_unique<SeriesRLLine>(p, frame);
            } else if constexpr (std::is_same_v<P, RLLoadParams>) {
                return std::make_unique<RLLoad>(p, frame);
            } else if constexpr (std::is_same_v<P, ShuntRCParams>) {
                return std::make_unique<ShuntRC>(p, frame);
            } else if constexpr (std::is_same_v<P, EmfSourceParams>) {
                return std::make_unique<EmfSource>(p, frame);
            } else {
                static_assert(std::is_same_v<P, PQSourceParams>);
                return std::make_unique<PQSource>(p, frame);
            }
        },
        params);
}

CompositeSystem::CompositeSystem(SystemSpec spec) : spec_(std::move(spec)) {
    comps_.reserve(spec_.components.size());
    for (const auto& cs : spec_.components) {
        if (cs.name.empty()) {
            throw std::invalid_argument("composite: component with empty name");
        }
        comps_.push_back(make_component(cs.params, spec_.frame));
    }
    for (std::size_t i = 0; i < spec_.components.size(); ++i) {
        for (std::size_t j = i + 1; j < spec_.components.size(); ++j) {
            if (spec_.components[i].name == spec_.components[j].name) {
                throw std::invalid_argument("composite: duplicate component name '" +
                                            spec_.components[i].name + "'");
            }
        }
    }
    validate_topology(comps_, spec_.topology);

    state_offset_.assign(1, 0);
    port_offset_.assign(1, 0);
    for (const auto& c : comps_) {
        state_offset_.push_back(state_offset_.back() + c->state_dim());
        port_offset_.push_back(port_offset_.back() + c->port_count());
        max_ports_ = std::max(max_ports_, c->port_count());
    }

    port_bus_.assign(static_cast<std::size_t>(port_offset_.back()), -1);
    buses_.resize(spec_.topology.buses.size());
    for (std::size_t b = 0; b < spec_.topology.buses.size(); ++b) {
        BusInfo& info = buses_[b];
        info.primary = Attachment{-1, -1};
        for (const Attachment& at : spec_.topology.buses[b].members) {
            port_bus_[static_cast<std::size_t>(port_offset(at.component) + at.port)] =
                static_cast<int>(b);
            const Component& c = component(at.component);
            if (c.port_kind(at.port) == PortKind::bus_voltage_owner) {
                info.owners.push_back(at);
                info.owner_c.push_back(c.shunt_capacitance(at.port));
                info.c_total += info.owner_c.back();
                if (info.primary.component < 0 && info.owner_c.back() > 0.0) {
                    info.primary = at;
                }
            } else {
                info.injectors.push_back(at);
            }
        }
    }

    bus_e_.resize(buses_.size());
    const auto np = static_cast<std::size_t>(total_port_count());
    efforts_.resize(np);
    flows_.resize(np);
    effort_rates_.resize(np);
    flow_rates_.resize(np);
    inputs_.resize(static_cast<std::size_t>(max_ports_));
}

int CompositeSystem::find_component(std::string_view name) const {
    for (std::size_t i = 0; i < spec_.components.size(); ++i) {
        if (spec_.components[i].name == name) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

int CompositeSystem::find_bus(std::string_view name) const {
    for (std::size_t b = 0; b < spec_.topology.buses.size(); ++b) {
        if (spec_.topology.buses[b].name == name) {
            return static_cast<int>(b);
        }
    }
    return -1;
}

std::span<const double> CompositeSystem::component_state(std::span<const double> x, int ci) const {
    return x.subspan(static_cast<std::size_t>(state_offset(ci)),
                     static_cast<std::size_t>(component(ci).state_dim()));
}

std::span<double> CompositeSystem::component_state(std::span<double> x, int ci) const {
    return x.subspan(static_cast<std::size_t>(state_offset(ci)),
                     static_cast<std::size_t>(component(ci).state_dim()));
}

Dq CompositeSystem::bus_effort(std::span<const double> x, int bus) const {
    const Attachment at = buses_[static_cast<std::size_t>(bus)].primary;
    return component(at.component).owned_effort(component_state(x, at.component), at.port);
}

void CompositeSystem::resolve_flows(double t, std::span<const double> x,
                                    const Exogenous& exo) const {
    // pass A: bus efforts, broadcast to every port
    for (std::size_t b = 0; b < buses_.size(); ++b) {
        bus_e_[b] = bus_effort(x, static_cast<int>(b));
    }
    for (std::size_t k = 0; k < port_bus_.size(); ++k) {
        efforts_[k] = bus_e_[static_cast<std::size_t>(port_bus_[k])];
    }

    // pass B: injector flows from efforts, then owner flows from KCL
    for (int ci = 0; ci < component_count(); ++ci) {
        const Component& c = component(ci);
        const auto off = static_cast<std::size_t>(port_offset(ci));
        const auto pc = static_cast<std::size_t>(c.port_count());
        const std::span<Dq> fl(flows_.data() + off, pc);
        for (auto& f : fl) {
            f = Dq{};
        }
        c.port_flows(component_state(x, ci), {efforts_.data() + off, pc}, exo, t, fl);
    }
    for (const BusInfo& bus : buses_) {
        Dq i_ext{};
        for (const Attachment& at : bus.injectors) {
            i_ext -= flows_[static_cast<std::size_t>(port_offset(at.component) + at.port)];
        }
        Dq draw_sum{};
        for (std::size_t k = 0; k < bus.owners.size(); ++k) {
            const Attachment at = bus.owners[k];
            draw_sum += component(at.component).shunt_draw(component_state(x, at.component), at.port);
        }
        for (std::size_t k = 0; k < bus.owners.size(); ++k) {
            const Attachment at = bus.owners[k];
            const Dq draw =
                component(at.component).shunt_draw(component_state(x, at.component), at.port);
            const double share = bus.owner_c[k] / bus.c_total;
            flows_[static_cast<std::size_t>(port_offset(at.component) + at.port)] =
                draw + share * (i_ext - draw_sum);
        }
    }
}

void CompositeSystem::derivative(double t, std::span<const double> x, const Exogenous& exo,
                                 std::span<double> dx) const {
    resolve_flows(t, x, exo);

    // pass C: per-component derivatives with resolved port signals
    for (int ci = 0; ci < component_count(); ++ci) {
        const Component& c = component(ci);
        const auto off = static_cast<std::size_t>(port_offset(ci));
        for (int p = 0; p < c.port_count(); ++p) {
            const std::size_t k = off + static_cast<std::size_t>(p);
            inputs_[static_cast<std::size_t>(p)].value =
                c.port_kind(p) == PortKind::bus_voltage_owner ? flows_[k] : efforts_[k];
        }
        c.derivative(component_state(x, ci), {inputs_.data(), static_cast<std::size_t>(c.port_count())},
                     exo, t, component_state(dx, ci));
    }
}

void CompositeSystem::port_records(double t, std::span<const double> x, std::span<const double> dx,
                                   const Exogenous& exo, std::span<PortVariables> out) const {
    if (out.size() != static_cast<std::size_t>(total_port_count())) {
        throw std::invalid_argument("composite: port record span has wrong size");
    }
    resolve_flows(t, x, exo);

    // pass D1: bus effort rates from the primary owner's state derivative
    for (std::size_t b = 0; b < buses_.size(); ++b) {
        const Attachment at = buses_[b].primary;
        bus_e_[b] = component(at.component).owned_effort(component_state(dx, at.component), at.port);
    }
    for (std::size_t k = 0; k < port_bus_.size(); ++k) {
        effort_rates_[k] = bus_e_[static_cast<std::size_t>(port_bus_[k])];
    }

    // pass D2: injector records first; their flow rates feed the KCL rate sums
    for (int ci = 0; ci < component_count(); ++ci) {
        const Component& c = component(ci);
        if (c.port_count() == 0 || c.port_kind(0) == PortKind::bus_voltage_owner) {
            continue;
        }
        const auto off = static_cast<std::size_t>(port_offset(ci));
        const auto pc = static_cast<std::size_t>(c.port_count());
        c.port_records(component_state(x, ci), component_state(dx, ci),
                       {efforts_.data() + off, pc}, {effort_rates_.data() + off, pc},
                       {flows_.data() + off, pc}, {flow_rates_.data() + off, pc}, exo, t,
                       out.subspan(off, pc));
        for (std::size_t p = 0; p < pc; ++p) {
            flow_rates_[off + p] = out[off + p].df_dt;
        }
    }

    // pass D3: owner flow rates from the Kirchhoff rate balance
    for (const BusInfo& bus : buses_) {
        Dq i_ext_rate{};
        for (const Attachment& at : bus.injectors) {
            i_ext_rate -= flow_rates_[static_cast<std::size_t>(port_offset(at.component) + at.port)];
        }
        Dq draw_rate_sum{};
        for (const Attachment& at : bus.owners) {
            draw_rate_sum += component(at.component)
                                 .shunt_draw_rate(component_state(x, at.component),
                                                  component_state(dx, at.component), at.port);
        }
        for (std::size_t k = 0; k < bus.owners.size(); ++k) {
            const Attachment at = bus.owners[k];
            const Dq draw_rate = component(at.component)
                                     .shunt_draw_rate(component_state(x, at.component),
                                                      component_state(dx, at.component), at.port);
            const double share = bus.owner_c[k] / bus.c_total;
            flow_rates_[static_cast<std::size_t>(port_offset(at.component) + at.port)] =
                draw_rate + share * (i_ext_rate - draw_rate_sum);
        }
    }

    // pass D4: owner records (copy-through of the resolved signals)
    for (int ci = 0; ci < component_count(); ++ci) {
        const Component& c = component(ci);
        if (c.port_count() == 0 || c.port_kind(0) != PortKind::bus_voltage_owner) {
            continue;
        }
        const auto off = static_cast<std::size_t>(port_offset(ci));
        const auto pc = static_cast<std::size_t>(c.port_count());
        c.port_records(component_state(x, ci), component_state(dx, ci),
                       {efforts_.data() + off, pc}, {effort_rates_.data() + off, pc},
                       {flows_.data() + off, pc}, {flow_rates_.data() + off, pc}, exo, t,
                       out.subspan(off, pc));
    }
}

} // namespace gridemt
