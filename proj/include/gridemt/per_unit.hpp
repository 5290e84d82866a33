#pragma once

#include <stdexcept>

namespace gridemt {

// =============================================================================
// Per-unit system
// =============================================================================
//
// All simulation quantities are per-unit on a single system base; time is kept
// in seconds. The base set is fully determined by (s_base, v_base, f_base):
//
//   i_base = s_base / v_base          z_base = v_base^2 / s_base
//   omega_base = 2*pi*f_base          t_base = 1 / omega_base
//
// "time" conversions express per-unit time in electrical radians, so a
// per-unit time constant tau_pu corresponds to tau_pu / omega_base seconds.

/// Quantity classes convertible between SI and per-unit.
enum class Quantity { power, voltage, current, impedance, time };

struct PerUnitBase {
    double s_base_va;   ///< three-phase apparent power base (VA)
    double v_base_v;    ///< voltage base (V)
    double f_base_hz;   ///< system frequency base (Hz)

    PerUnitBase(double s_va, double v_v, double f_hz)
        : s_base_va(s_va), v_base_v(v_v), f_base_hz(f_hz) {
        if (!(s_base_va > 0.0) || !(v_base_v > 0.0) || !(f_base_hz > 0.0))
            throw std::invalid_argument("per-unit base values must be positive");
    }

    [[nodiscard]] double i_base_a() const { return s_base_va / v_base_v; }
    [[nodiscard]] double z_base_ohm() const { return v_base_v * v_base_v / s_base_va; }
    [[nodiscard]] double omega_base() const { return 2.0 * 3.141592653589793238462643383279502884 * f_base_hz; }
    [[nodiscard]] double t_base_s() const { return 1.0 / omega_base(); }

    [[nodiscard]] double base_of(Quantity q) const {
        switch (q) {
            case Quantity::power:     return s_base_va;
            case Quantity::voltage:   return v_base_v;
            case Quantity::current:   return i_base_a();
            case Quantity::impedance: return z_base_ohm();
            case Quantity::time:      return t_base_s();
        }
        throw std::invalid_argument("unknown per-unit quantity kind");
    }
};

/// SI value -> per-unit value on the given base.
[[nodiscard]] inline double to_per_unit(double si_value, Quantity q, const PerUnitBase& base) {
    return si_value / base.base_of(q);
}

/// Per-unit value -> SI value on the given base.
[[nodiscard]] inline double from_per_unit(double pu_value, Quantity q, const PerUnitBase& base) {
    return pu_value * base.base_of(q);
}

} // namespace gridemt
