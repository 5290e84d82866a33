#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gridemt/port.hpp"

namespace gridemt {

// =============================================================================
// Energy-dynamics layer
// =============================================================================
//
// Scalar bookkeeping attached to every component state:
//
//   E   = 1/2 x^T H x          stored energy (p.u.-s)
//   D   = 1/2 x^T B x          total instantaneous dissipated power (p.u.)
//   tau = 2 E / D              component time constant (s); L/R for an RL branch
//   E_t = 1/2 x'^T H x'        tangent energy (p.u./s ... p.u.-s * s^-2)
//   p   = x^T H x'             exact dE/dt (p.u.)
//   P   = sum_ports e.f        net port power into the component (p.u.)
//   Qd  = sum_ports +-(e.f' - f.e')   element-convention reactive mismatch rate
//
// For port-only components dE/dt = P - D holds exactly; dp/dt = 4 E_t - Qd
// holds exactly for single-storage elements in a stationary frame. Both are
// verified numerically by finite-differencing trace samples (never used
// inside the simulation itself).

struct EnergySnapshot {
    double stored = 0.0;        ///< E
    double dissipated = 0.0;    ///< D
    double tau = 0.0;           ///< 2E/D, or the nominal value when E and D vanish
    double tangent = 0.0;       ///< E_t
    double e_rate = 0.0;        ///< p = exact dE/dt
    double port_power = 0.0;    ///< P summed over ports
    double port_qdot = 0.0;     ///< Qd summed over ports, element convention
};

/// 1/2 x^T H x. Pre: H symmetric PSD.
[[nodiscard]] double stored_energy(std::span<const double> x, const Eigen::MatrixXd& H);

/// 1/2 x^T B x with the doubled damping metric: total dissipated power.
[[nodiscard]] double dissipated_power(std::span<const double> x, const Eigen::MatrixXd& B);

/// Plain ratio E/D. Pre: D > 0.
[[nodiscard]] double time_constant(double E, double D);

/// 1/2 dx^T H dx.
[[nodiscard]] double tangent_energy(std::span<const double> dx, const Eigen::MatrixXd& H);

/// Builds the full snapshot for one component state/derivative/port set.
[[nodiscard]] EnergySnapshot energy_snapshot(std::span<const double> x, std::span<const double> dx,
                                             std::span<const PortVariables> ports,
                                             const Eigen::MatrixXd& H, const Eigen::MatrixXd& B,
                                             QdotConvention sign, double nominal_tau);

// -----------------------------------------------------------------------------
// Sampled-trace residuals
// -----------------------------------------------------------------------------

/// Energy-balance residual series over uniformly sampled data:
///   r1[k] = FD(E)[k] - (P[k] - D[k])      (power balance)
///   r2[k] = FD(p)[k] - (4 E_t[k] - Qd[k]) (tangent-energy identity)
/// Interior points use a centered stencil: 4th order with >= 5 samples,
/// 2nd order with 3 or 4. Endpoints are excluded. Pre: samples >= 3,
/// uniform step dt > 0; throws otherwise.
struct BalanceResiduals {
    std::vector<double> r1;
    std::vector<double> r2;
    double max_abs_r1 = 0.0;
    double max_abs_r2 = 0.0;
};

[[nodiscard]] BalanceResiduals energy_balance_residuals(std::span<const double> E,
                                                        std::span<const double> D,
                                                        std::span<const double> P,
                                                        std::span<const double> p,
                                                        std::span<const double> Et,
                                                        std::span<const double> Qd, double dt);

/// Centered finite-difference derivative of a uniformly sampled series
/// (4th-order stencil with >= 5 samples, 2nd-order otherwise); endpoints are
/// one-sided 2nd order. Exposed for cross-checking analytic derivatives.
[[nodiscard]] std::vector<double> finite_difference(std::span<const double> y, double dt);

// -----------------------------------------------------------------------------
// Tellegen sums
// -----------------------------------------------------------------------------

/// Network-wide conservation check over ALL ports (uniform qdot convention):
///   residual_power = |sum e.f|, residual_power_rate = |sum (e.f)'|,
///   residual_qdot = |sum (e.f' - f.e')|.
/// `scale` is the sum of absolute port powers, for relative comparisons.
struct TellegenReport {
    double residual_power = 0.0;
    double residual_power_rate = 0.0;
    double residual_qdot = 0.0;
    double scale = 0.0;
};

[[nodiscard]] TellegenReport tellegen_residuals(std::span<const PortVariables> all_ports);

} // namespace gridemt
