#include "gridemt/topology.hpp"

#include <set>
#include <stdexcept>

namespace gridemt {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("topology: " + what);
}

} // namespace

void validate_topology(const std::vector<std::unique_ptr<Component>>& components,
                       const Topology& topology) {
    const int n_comp = static_cast<int>(components.size());
    if (n_comp == 0) {
        fail("no components");
    }
    if (topology.buses.empty()) {
        fail("no buses");
    }

    std::set<std::string> names;
    for (const auto& bus : topology.buses) {
        if (bus.name.empty()) {
            fail("bus with empty name");
        }
        if (!names.insert(bus.name).second) {
            fail("duplicate bus name '" + bus.name + "'");
        }
        if (bus.members.empty()) {
            fail("bus '" + bus.name + "' has no attachments");
        }
    }

    std::set<std::pair<int, int>> seen;
    for (const auto& bus : topology.buses) {
        bool has_owner_capacitance = false;
        for (const auto& at : bus.members) {
            if (at.component < 0 || at.component >= n_comp) {
                fail("bus '" + bus.name + "' references component index out of range");
            }
            const Component& c = *components[static_cast<std::size_t>(at.component)];
            if (at.port < 0 || at.port >= c.port_count()) {
                fail("bus '" + bus.name + "' references port index out of range for component '" +
                     std::string(c.type_name()) + "'");
            }
            if (!seen.insert({at.component, at.port}).second) {
                fail("port attached to more than one bus");
            }
            if (c.port_kind(at.port) == PortKind::bus_voltage_owner &&
                c.shunt_capacitance(at.port) > 0.0) {
                has_owner_capacitance = true;
            }
        }
        if (!has_owner_capacitance) {
            fail("bus '" + bus.name + "' has no voltage-owning port with positive capacitance");
        }
    }

    for (int ci = 0; ci < n_comp; ++ci) {
        const Component& c = *components[static_cast<std::size_t>(ci)];
        int attached = 0;
        for (const auto& bus : topology.buses) {
            for (const auto& at : bus.members) {
                if (at.component == ci) {
                    ++attached;
                }
            }
        }
        if (attached != c.port_count()) {
            fail("component '" + std::string(c.type_name()) + "' has unattached ports");
        }
        bool any_owner = false, any_injector = false;
        for (int p = 0; p < c.port_count(); ++p) {
            (c.port_kind(p) == PortKind::bus_voltage_owner ? any_owner : any_injector) = true;
        }
        if (any_owner && any_injector) {
            fail("component '" + std::string(c.type_name()) +
                 "' mixes owner and injector ports");
        }
        if (c.role() == ComponentRole::transmission_line && c.port_count() == 2) {
            int bus0 = -1, bus1 = -1;
            for (std::size_t b = 0; b < topology.buses.size(); ++b) {
                for (const auto& at : topology.buses[b].members) {
                    if (at.component == ci) {
                        (at.port == 0 ? bus0 : bus1) = static_cast<int>(b);
                    }
                }
            }
            if (bus0 == bus1) {
                fail("transmission line closes on a single bus");
            }
        }
        // a component that stores energy but never dissipates has no finite
        // time constant; tracking sources carry no storage and are exempt
        if (c.state_dim() > 0 && c.role() != ComponentRole::pq_source) {
            const std::vector<double> zeros(static_cast<std::size_t>(c.state_dim()), 0.0);
            if (c.inertia_metric(zeros).norm() > 0.0 && c.is_lossless()) {
                fail("component '" + std::string(c.type_name()) +
                     "' stores energy but dissipates nothing");
            }
        }
    }
}

} // namespace gridemt
