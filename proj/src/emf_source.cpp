#include "gridemt/emf_source.hpp"

namespace gridemt {

EmfSource::EmfSource(const EmfSourceParams& p, const Frame& frame) : p_(p), frame_(frame) {
    if (!(p_.r > 0.0)) throw std::invalid_argument("emf_source: r must be > 0");
    if (!(p_.l > 0.0)) throw std::invalid_argument("emf_source: l must be > 0");
}

void EmfSource::port_flows(std::span<const double> x, std::span<const Dq>, const Exogenous&,
                           double, std::span<Dq> flows) const {
    flows[0] = Dq{-x[0], -x[1]};  // state current flows out of the source
}

void EmfSource::derivative(std::span<const double> x, std::span<const PortSignal> inputs,
                           const Exogenous& exo, double, std::span<double> dx) const {
    const Dq v = inputs[0].value;
    const Dq e = emf(exo);
    const Dq i{x[0], x[1]};
    const double w = frame_.omega_pu;
    dx[0] = frame_.omega_base / p_.l * (e.d - v.d - p_.r * i.d + w * p_.l * i.q);
    dx[1] = frame_.omega_base / p_.l * (e.q - v.q - p_.r * i.q - w * p_.l * i.d);
}

void EmfSource::port_records(std::span<const double> x, std::span<const double> dx,
                             std::span<const Dq> efforts, std::span<const Dq> effort_rates,
                             std::span<const Dq>, std::span<const Dq>, const Exogenous&, double,
                             std::span<PortVariables> out) const {
    out[0].e = efforts[0];
    out[0].de_dt = effort_rates[0];
    out[0].f = Dq{-x[0], -x[1]};
    out[0].df_dt = Dq{-dx[0], -dx[1]};
}

Eigen::MatrixXd EmfSource::inertia_metric(std::span<const double>) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
    h(0, 0) = h(1, 1) = p_.l / frame_.omega_base;
    return h;
}

Eigen::MatrixXd EmfSource::damping_metric(std::span<const double>, const Exogenous&) const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 2);
    b(0, 0) = b(1, 1) = 2.0 * p_.r;
    return b;
}

double EmfSource::nominal_time_constant() const { return p_.l / p_.r / frame_.omega_base; }

} // namespace gridemt
