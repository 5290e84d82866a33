#pragma once

#include <memory>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "gridemt/component.hpp"
#include "gridemt/emf_source.hpp"
#include "gridemt/machine.hpp"
#include "gridemt/pi_line.hpp"
#include "gridemt/pq_source.hpp"
#include "gridemt/rl_load.hpp"
#include "gridemt/series_rl_line.hpp"
#include "gridemt/shunt_rc.hpp"
#include "gridemt/topology.hpp"

namespace gridemt {

// =============================================================================
// Composite system
// =============================================================================
//
// Glues components into one flat ODE  x' = f(t, x, exogenous)  by resolving
// the port coupling at every bus:
//
//   pass A  bus efforts are read from the primary voltage-owning port
//   pass B  injector flows from the efforts; owner flows from Kirchhoff's
//           current law, split pro-rata by shunt capacitance so that every
//           owner copy of a shared bus voltage keeps an identical derivative
//   pass C  per-component state derivatives
//   pass D  (records only) analytic effort/flow rates, injectors first, then
//           owner flow rates from the Kirchhoff sum of injector rates
//
// The pro-rata split keeps the bus current sum exact, so network-wide power
// sums cancel to rounding noise by construction.

/// Parameter set for one component instance (tagged by type).
using ComponentParams = std::variant<MachineParams, PiLineParams, SeriesRLLineParams,
                                     RLLoadParams, ShuntRCParams, EmfSourceParams, PQSourceParams>;

struct ComponentSpec {
    std::string name;
    ComponentParams params;
};

/// Complete rebuildable description of a network (components + wiring).
struct SystemSpec {
    Frame frame{2.0 * std::numbers::pi * 60.0, 1.0};
    std::vector<ComponentSpec> components;
    Topology topology;
};

/// Instantiates one component from its parameter variant.
[[nodiscard]] std::unique_ptr<Component> make_component(const ComponentParams& params,
                                                        const Frame& frame);

class CompositeSystem {
public:
    /// Builds and validates; throws std::invalid_argument on structural errors.
    explicit CompositeSystem(SystemSpec spec);

    [[nodiscard]] const SystemSpec& spec() const { return spec_; }
    [[nodiscard]] const Frame& frame() const { return spec_.frame; }

    [[nodiscard]] int state_dim() const { return state_offset_.back(); }
    [[nodiscard]] int component_count() const { return static_cast<int>(comps_.size()); }
    [[nodiscard]] int bus_count() const { return static_cast<int>(spec_.topology.buses.size()); }
    [[nodiscard]] int total_port_count() const { return port_offset_.back(); }

    [[nodiscard]] const Component& component(int ci) const { return *comps_[static_cast<std::size_t>(ci)]; }
    [[nodiscard]] const std::string& component_name(int ci) const {
        return spec_.components[static_cast<std::size_t>(ci)].name;
    }
    /// Index of the named component, or -1.
    [[nodiscard]] int find_component(std::string_view name) const;
    /// Index of the named bus, or -1.
    [[nodiscard]] int find_bus(std::string_view name) const;

    [[nodiscard]] int state_offset(int ci) const { return state_offset_[static_cast<std::size_t>(ci)]; }
    /// Offset of component ci in flattened per-port arrays.
    [[nodiscard]] int port_offset(int ci) const { return port_offset_[static_cast<std::size_t>(ci)]; }
    /// Bus index a port is attached to.
    [[nodiscard]] int port_bus(int ci, int port) const {
        return port_bus_[static_cast<std::size_t>(port_offset(ci) + port)];
    }

    [[nodiscard]] std::span<const double> component_state(std::span<const double> x, int ci) const;
    [[nodiscard]] std::span<double> component_state(std::span<double> x, int ci) const;

    /// Bus voltage read from the primary owner's state slots. Passing a state
    /// derivative instead of a state yields the bus voltage rate.
    [[nodiscard]] Dq bus_effort(std::span<const double> x, int bus) const;

    /// Flat ODE right-hand side.
    void derivative(double t, std::span<const double> x, const Exogenous& exo,
                    std::span<double> dx) const;

    /// Analytic port records for every port (flattened component-major,
    /// `total_port_count()` entries). `dx` must be derivative(t, x, exo).
    void port_records(double t, std::span<const double> x, std::span<const double> dx,
                      const Exogenous& exo, std::span<PortVariables> out) const;

private:
    struct BusInfo {
        Attachment primary;                ///< first owner with positive capacitance
        std::vector<Attachment> owners;    ///< all owner ports
        std::vector<double> owner_c;       ///< their capacitances
        std::vector<Attachment> injectors; ///< all injector ports
        double c_total = 0.0;
    };

    void resolve_flows(double t, std::span<const double> x, const Exogenous& exo) const;

    SystemSpec spec_;
    std::vector<std::unique_ptr<Component>> comps_;
    std::vector<int> state_offset_;  ///< size n+1
    std::vector<int> port_offset_;   ///< size n+1
    std::vector<int> port_bus_;      ///< flattened
    std::vector<BusInfo> buses_;
    int max_ports_ = 0;

    // scratch buffers; the composite is single-threaded by design
    mutable std::vector<Dq> bus_e_;
    mutable std::vector<Dq> efforts_;
    mutable std::vector<Dq> flows_;
    mutable std::vector<Dq> effort_rates_;
    mutable std::vector<Dq> flow_rates_;
    mutable std::vector<PortSignal> inputs_;
};

} // namespace gridemt
