#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gridemt/component.hpp"

namespace gridemt {

// =============================================================================
// Network topology
// =============================================================================
//
// A topology assigns every component port to exactly one bus. Buses carry no
// state of their own: each bus voltage lives inside at least one attached
// bus-voltage-owner port (a shunt capacitor), which is what keeps the
// composite system a pure ODE.

/// One port of one component, by index.
struct Attachment {
    int component = -1;
    int port = -1;
};

struct BusSpec {
    std::string name;
    std::vector<Attachment> members;
};

struct Topology {
    std::vector<BusSpec> buses;
};

/// Structural validation of a component/topology pairing. Throws
/// std::invalid_argument naming the first violated rule:
///   - attachment indices in range, every port attached exactly once
///   - unique bus names, no empty bus
///   - every bus has at least one owner port with positive shunt capacitance
///   - no component mixes owner and injector ports
///   - no transmission line closes on a single bus
///   - every energy-storing component dissipates (finite time constant);
///     tracking sources with no storage are exempt
void validate_topology(const std::vector<std::unique_ptr<Component>>& components,
                       const Topology& topology);

} // namespace gridemt
