#pragma once

#include <string>
#include <vector>

#include "gridemt/integrator.hpp"

namespace gridemt {

// =============================================================================
// Trace analysis
// =============================================================================
//
// Scalar forms evaluated pointwise on recorded traces:
//
//   storage rate     Sdot = 4 sum_TL E_t
//   supply rate      s    = sum_G -P/tau + sum_L -P/tau
//   boundary form    Sdot expressed through boundary injections and line
//                    energies only (the network-interior terms cancel through
//                    Kirchhoff sums)
//   loadability      lhs <= rhs with margin = rhs - lhs
//
// Component time constants are E/D snapshots (half the 2E/D trace column),
// falling back to half the nominal constant when the state carries no energy;
// tracking sources use their tracking constant. All boundary sums take the
// uniform qdot convention, and PQ sources are counted with the generators.

struct LoadabilityRow {
    double t = 0.0;
    double lhs = 0.0;           ///< sum_L (1/tau_tl + 1/tau_k) P_k
    double rhs = 0.0;           ///< bound from line energies and boundary rates
    double margin = 0.0;        ///< rhs - lhs
    double storage_rate = 0.0;  ///< 4 sum_TL E_t
    double supply = 0.0;        ///< sum_G -P/tau + sum_L -P/tau
    double sdot_boundary = 0.0; ///< storage rate via the boundary-only form
    double tau_tl = 0.0;        ///< common line time constant used (s)
};

/// Storage rate 4 sum_TL E_t at sample k.
[[nodiscard]] double storage_rate(const CompositeSystem& sys, const Trace& trace, std::size_t k);

/// Supply rate at sample k.
[[nodiscard]] double supply_rate(const CompositeSystem& sys, const Trace& trace, std::size_t k);

/// Storage rate via the boundary-only form at sample k.
[[nodiscard]] double sdot_boundary_form(const CompositeSystem& sys, const Trace& trace,
                                        std::size_t k);

/// Full loadability row at sample k. Warns once per call set when line time
/// constants differ by more than 1% (the bound assumes a common value).
[[nodiscard]] LoadabilityRow loadability_row(const CompositeSystem& sys, const Trace& trace,
                                             std::size_t k);

/// Rows for every sample of the trace.
[[nodiscard]] std::vector<LoadabilityRow> loadability_report(const CompositeSystem& sys,
                                                             const Trace& trace);

// -----------------------------------------------------------------------------
// Loadability delta bound
// -----------------------------------------------------------------------------
//
// Bound on the change in dynamic loadability between a with-support and a
// without-support run. Per-port reactive power is Q = cross(e, f); the rate
// sums integrate exactly to endpoint differences, so the bound over a window
// [t0, t1] is evaluated from matched samples at the window edges:
//
//   contribution_c = [dP_c + dQ_c](t1) - [dP_c + dQ_c](t0),  dX = X_with - X_without
//
// The reported bound is the magnitude of the support devices' own
// contribution: the support only adds its own boundary terms, the rest of the
// boundary deltas telescope into network-interior changes.

struct DeltaContribution {
    std::string component;
    double delta = 0.0;  ///< [dP + dQ](t1) - [dP + dQ](t0)
    bool support = false;
};

struct DeltaBoundReport {
    std::vector<DeltaContribution> per_component;  ///< boundary components
    double support_delta = 0.0;                    ///< sum over support devices
    double bound = 0.0;                            ///< |support_delta|
};

/// Window edges snap to the nearest recorded samples; traces must share the
/// recording grid. Components are matched by name; `support_components` are
/// those whose activity differs between the runs (enabled only in `with`).
[[nodiscard]] DeltaBoundReport loadability_delta_bound(
    const CompositeSystem& sys_with, const Trace& with, const CompositeSystem& sys_without,
    const Trace& without, double t0, double t1,
    std::span<const std::string> support_components);

// -----------------------------------------------------------------------------
// Stability classification
// -----------------------------------------------------------------------------

struct StabilityCriterion {
    double epsilon = 1e-3;         ///< allowed final deviation from the reference (p.u.)
    double min_periods = 20.0;     ///< required post-window length in dominant periods
    double envelope_slack = 0.05;  ///< tolerated envelope growth over the final third
    double final_fraction = 0.1;   ///< tail fraction checked against epsilon
};

enum class StabilityVerdict { stable, unstable, inconclusive };

/// Classifies a disturbance run against a reference state. `window_start` is
/// the end of the disturbance; the verdict is inconclusive when the remaining
/// window is shorter than min_periods dominant oscillation periods.
[[nodiscard]] StabilityVerdict classify_stability(const Trace& trace,
                                                  std::span<const double> reference,
                                                  double window_start,
                                                  const StabilityCriterion& crit = {});

// -----------------------------------------------------------------------------
// Line-power spectrum
// -----------------------------------------------------------------------------
//
// The rotating-frame port pair (P, Q) of a line terminal is re-expanded
// around the carrier: p(t) = P(t) cos(w_s t) - Q(t) sin(w_s t), the
// stationary-frame instantaneous power waveform. Its discrete spectrum
// (Hann window, radix-2 FFT) separates carrier-band behavior from
// machine-line interaction sidebands.

struct Spectrum {
    std::vector<double> freq_hz;
    std::vector<double> energy;        ///< |X(f)|^2 per bin
    double in_band_fraction = 0.0;     ///< share of AC energy inside the band
    double band_lo_hz = 0.0;
    double band_hi_hz = 0.0;
};

/// Spectrum of the reconstructed line power at `component`'s port 0 over
/// samples with t >= window_start. Requires a uniform record grid.
[[nodiscard]] Spectrum line_power_spectrum(const CompositeSystem& sys, const Trace& trace,
                                           const std::string& component, double window_start,
                                           double band_center_hz = 60.0, double band_half_hz = 2.0,
                                           double ac_min_hz = 1.0);

/// Hann-windowed energy spectrum of a uniformly sampled series (radix-2 FFT,
/// zero-padded). Returns per-bin |X|^2 up to the Nyquist frequency.
[[nodiscard]] Spectrum energy_spectrum(std::span<const double> samples, double dt);

} // namespace gridemt
