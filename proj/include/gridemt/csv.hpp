#pragma once

#include <string>

#include "gridemt/analysis.hpp"
#include "gridemt/composite.hpp"
#include "gridemt/integrator.hpp"
#include "gridemt/sweep.hpp"

namespace gridemt {

// =============================================================================
// CSV output
// =============================================================================
//
// All writers emit a header row and 12-significant-digit values, so energy
// residuals survive a round trip through the files. Column layouts are
// documented in docs/output-formats.md.

/// Formats one value with 12 significant digits.
[[nodiscard]] std::string csv_number(double v);

/// Trace: t, per-state columns, per-port e/f and rates, per-component energy
/// snapshot columns, then the three network conservation residuals.
void write_trace_csv(const std::string& path, const CompositeSystem& sys, const Trace& trace);

/// PV sweep: one row per grid point (R, V, P, flags, branch).
void write_pv_csv(const std::string& path, std::span<const PVPoint> points);

/// Loadability: one row per sample (t, lhs, rhs, margin, storage rate, supply,
/// boundary-form storage rate, line time constant).
void write_loadability_csv(const std::string& path, std::span<const LoadabilityRow> rows);

/// Spectrum: frequency bins with spectral energy.
void write_spectrum_csv(const std::string& path, const Spectrum& spectrum);

} // namespace gridemt
