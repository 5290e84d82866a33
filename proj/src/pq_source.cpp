#include "gridemt/pq_source.hpp"

#include <algorithm>
#include <cmath>

namespace gridemt {

PQSource::PQSource(const PQSourceParams& p, const Frame& frame) : p_(p), frame_(frame) {
    if (!(p_.tau_p > 0.0)) throw std::invalid_argument("pq_source: tau_p must be > 0");
    if (!(p_.tau_q > 0.0)) throw std::invalid_argument("pq_source: tau_q must be > 0");
    if (!(p_.v_floor > 0.0)) throw std::invalid_argument("pq_source: v_floor must be > 0");
    if (!(p_.tau_v > 0.0)) throw std::invalid_argument("pq_source: tau_v must be > 0");
}

void PQSource::flat_start(std::span<double> x, double v_mag) const {
    x[0] = 0.0;
    x[1] = 0.0;
    x[2] = v_mag;
}

Dq PQSource::injection(double i_p, double i_q, const Dq& e) const {
    const double w = std::max(magnitude(e), p_.v_floor);
    return {(i_p * e.d + i_q * e.q) / w, (i_p * e.q - i_q * e.d) / w};
}

void PQSource::port_flows(std::span<const double> x, std::span<const Dq> efforts,
                          const Exogenous& exo, double, std::span<Dq> flows) const {
    flows[0] = exo.pq_enabled ? injection(x[0], x[1], efforts[0]) : Dq{};
}

void PQSource::derivative(std::span<const double> x, std::span<const PortSignal> inputs,
                          const Exogenous& exo, double, std::span<double> dx) const {
    if (!exo.pq_enabled) {
        dx[0] = dx[1] = dx[2] = 0.0;
        return;
    }
    const Dq e = inputs[0].value;
    const double w = std::max(magnitude(e), p_.v_floor);
    const double u = std::max(x[2], p_.v_floor);
    const double p_del = x[0] * w;
    const double q_del = x[1] * w;
    dx[0] = -(p_del - p_.p_set) / (p_.tau_p * u);
    dx[1] = -(q_del - p_.q_set) / (p_.tau_q * u);
    dx[2] = (magnitude(e) - x[2]) / p_.tau_v;
}

void PQSource::port_records(std::span<const double> x, std::span<const double> dx,
                            std::span<const Dq> efforts, std::span<const Dq> effort_rates,
                            std::span<const Dq>, std::span<const Dq>, const Exogenous& exo, double,
                            std::span<PortVariables> out) const {
    const Dq e = efforts[0];
    const Dq de = effort_rates[0];
    out[0].e = e;
    out[0].de_dt = de;
    if (!exo.pq_enabled) {
        out[0].f = Dq{};
        out[0].df_dt = Dq{};
        return;
    }
    const double ip = x[0], iq = x[1];
    const double mag = magnitude(e);
    const bool floored = mag < p_.v_floor;
    const double w = floored ? p_.v_floor : mag;
    const Dq f{(ip * e.d + iq * e.q) / w, (ip * e.q - iq * e.d) / w};
    // d/dt of the injection: numerator chain plus the 1/w factor (constant
    // while the floor is active).
    const double dw = floored || mag <= 0.0 ? 0.0 : dot(e, de) / mag;
    const double num_d = dx[0] * e.d + ip * de.d + dx[1] * e.q + iq * de.q;
    const double num_q = dx[0] * e.q + ip * de.q - dx[1] * e.d - iq * de.d;
    out[0].f = f;
    out[0].df_dt = Dq{(num_d - f.d * dw) / w, (num_q - f.q * dw) / w};
}

Eigen::MatrixXd PQSource::inertia_metric(std::span<const double>) const {
    return Eigen::MatrixXd::Zero(3, 3);
}

Eigen::MatrixXd PQSource::damping_metric(std::span<const double>, const Exogenous&) const {
    return Eigen::MatrixXd::Zero(3, 3);
}

} // namespace gridemt
