#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gridemt/analysis.hpp"
#include "gridemt/composite.hpp"
#include "gridemt/integrator.hpp"
#include "gridemt/per_unit.hpp"
#include "gridemt/sweep.hpp"

namespace gridemt {

// =============================================================================
// Scenario files
// =============================================================================
//
// A scenario is a JSON document bundling the network description, the event
// schedule, integration settings, and experiment options. Parsing is strict:
// unknown fields are rejected with the offending path, and syntax errors are
// reported with file, line, and column.

/// Thrown for unreadable, malformed, or schema-violating scenario files.
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Resistance grid for PV sweeps, descending from open toward short circuit.
struct RGridSpec {
    double start = 0.0;       ///< largest resistance (p.u.)
    double stop = 0.0;        ///< smallest resistance (p.u.), < start
    int count = 0;            ///< number of grid points, >= 2
    bool log_spacing = false; ///< geometric instead of linear spacing

    [[nodiscard]] std::vector<double> values() const;
};

/// Window and band for the line-power spectrum experiment.
struct SpectrumConfig {
    std::string component;           ///< transmission line to analyze
    double window_start = 0.5;       ///< spectrum window onset (s)
    double band_center_hz = 60.0;
    double band_half_width_hz = 2.0;
};

/// Names and knobs consumed by the experiment runners; plain simulation runs
/// only need `slack_machine` (empty when no machine fixes the angle gauge).
struct AnalysisConfig {
    std::string slack_machine;
    std::string load_component;     ///< RL load swept across the resistance grid
    std::string line_component;     ///< line rescaled by --line-inductance
    std::string support_component;  ///< PQ source toggled by --with-q-support
    RGridSpec r_grid;
    DisturbanceSpec disturbance;
    StabilityCriterion stability;
    double sweep_t_end = 6.0;       ///< run length per PV point (s)
    SpectrumConfig spectrum;
};

struct Scenario {
    std::string name;
    PerUnitBase per_unit{100e6, 230e3, 60.0};
    SystemSpec spec;
    Schedule schedule;
    SimOptions sim;
    bool equilibrium_start = true;  ///< solve an equilibrium before simulating
    AnalysisConfig analysis;
};

/// Parses scenario text; `origin` names the source in error messages.
[[nodiscard]] Scenario parse_scenario(const std::string& text, const std::string& origin);

/// Reads and parses a scenario file.
[[nodiscard]] Scenario load_scenario(const std::string& path);

} // namespace gridemt
