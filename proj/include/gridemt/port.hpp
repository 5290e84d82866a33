#pragma once

#include <cmath>

namespace gridemt {

// =============================================================================
// Port variables
// =============================================================================
//
// Every component interacts with the network through ports carrying an effort
// (bus voltage) and a flow (current, positive INTO the component). In the
// rotating reference frame each signal is a dq pair. Derivatives are always
// analytic: they are propagated from state derivatives and Kirchhoff current
// sums, never from finite differences.

/// A dq pair (d ~ real axis, q ~ imaginary axis of the frame phasor).
struct Dq {
    double d = 0.0;
    double q = 0.0;

    Dq() = default;
    Dq(double d_, double q_) : d(d_), q(q_) {}

    Dq& operator+=(const Dq& o) { d += o.d; q += o.q; return *this; }
    Dq& operator-=(const Dq& o) { d -= o.d; q -= o.q; return *this; }
};

[[nodiscard]] inline Dq operator+(Dq a, const Dq& b) { return a += b; }
[[nodiscard]] inline Dq operator-(Dq a, const Dq& b) { return a -= b; }
[[nodiscard]] inline Dq operator*(double s, const Dq& a) { return {s * a.d, s * a.q}; }
[[nodiscard]] inline Dq operator*(const Dq& a, double s) { return {s * a.d, s * a.q}; }
[[nodiscard]] inline Dq operator-(const Dq& a) { return {-a.d, -a.q}; }

/// Dot product of two dq pairs.
[[nodiscard]] inline double dot(const Dq& a, const Dq& b) { return a.d * b.d + a.q * b.q; }

/// Cross term v_q*i_d - v_d*i_q (instantaneous reactive power when a = voltage, b = current).
[[nodiscard]] inline double cross(const Dq& a, const Dq& b) { return a.q * b.d - a.d * b.q; }

[[nodiscard]] inline double magnitude(const Dq& a) { return std::hypot(a.d, a.q); }

/// Rotate a dq pair by angle theta (multiplication by e^{j*theta}).
[[nodiscard]] inline Dq rotate(const Dq& a, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c * a.d - s * a.q, s * a.d + c * a.q};
}

/// Complete analytic signal set at one port.
struct PortVariables {
    Dq e;      ///< effort (bus voltage, p.u.)
    Dq f;      ///< flow into the port (p.u. current)
    Dq de_dt;  ///< analytic d/dt of the effort (p.u./s)
    Dq df_dt;  ///< analytic d/dt of the flow (p.u./s)
};

/// Qdot sign convention: inductive storage uses e.df - f.de, capacitive the negative.
enum class QdotConvention { inductive, capacitive };

/// Instantaneous port power e.f (p.u.).
[[nodiscard]] inline double port_power(const PortVariables& pv) { return dot(pv.e, pv.f); }

/// Analytic d/dt of the port power (p.u./s).
[[nodiscard]] inline double port_power_rate(const PortVariables& pv) {
    return dot(pv.de_dt, pv.f) + dot(pv.e, pv.df_dt);
}

/// Reactive-power mismatch rate under the given element convention (p.u./s).
[[nodiscard]] inline double port_qdot(const PortVariables& pv, QdotConvention sign) {
    const double q = dot(pv.e, pv.df_dt) - dot(pv.f, pv.de_dt);
    return sign == QdotConvention::inductive ? q : -q;
}

/// Uniform-convention qdot used for network-wide (Tellegen) sums.
[[nodiscard]] inline double port_qdot_uniform(const PortVariables& pv) {
    return dot(pv.e, pv.df_dt) - dot(pv.f, pv.de_dt);
}

} // namespace gridemt
