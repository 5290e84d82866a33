#include "gridemt/series_rl_line.hpp"

namespace gridemt {

SeriesRLLine::SeriesRLLine(const SeriesRLLineParams& p, const Frame& frame)
    : p_(p), frame_(frame) {
    if (!(p_.r > 0.0)) throw std::invalid_argument("series_rl_line: r must be > 0");
    if (!(p_.l > 0.0)) throw std::invalid_argument("series_rl_line: l must be > 0");
}

void SeriesRLLine::port_flows(std::span<const double> x, std::span<const Dq>, const Exogenous&,
                              double, std::span<Dq> flows) const {
    const Dq i{x[0], x[1]};
    flows[0] = i;   // enters at port 0
    flows[1] = -i;  // leaves at port 1
}

void SeriesRLLine::derivative(std::span<const double> x, std::span<const PortSignal> inputs,
                              const Exogenous&, double, std::span<double> dx) const {
    const Dq v0 = inputs[0].value;
    const Dq v1 = inputs[1].value;
    const Dq i{x[0], x[1]};
    const double w = frame_.omega_pu;
    dx[0] = frame_.omega_base / p_.l * (v0.d - v1.d - p_.r * i.d + w * p_.l * i.q);
    dx[1] = frame_.omega_base / p_.l * (v0.q - v1.q - p_.r * i.q - w * p_.l * i.d);
}

void SeriesRLLine::port_records(std::span<const double> x, std::span<const double> dx,
                                std::span<const Dq> efforts, std::span<const Dq> effort_rates,
                                std::span<const Dq>, std::span<const Dq>, const Exogenous&, double,
                                std::span<PortVariables> out) const {
    const Dq i{x[0], x[1]};
    const Dq di{dx[0], dx[1]};
    out[0] = {efforts[0], i, effort_rates[0], di};
    out[1] = {efforts[1], -i, effort_rates[1], -di};
}

Eigen::MatrixXd SeriesRLLine::inertia_metric(std::span<const double>) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
    h(0, 0) = h(1, 1) = p_.l / frame_.omega_base;
    return h;
}

Eigen::MatrixXd SeriesRLLine::damping_metric(std::span<const double>, const Exogenous&) const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 2);
    b(0, 0) = b(1, 1) = 2.0 * p_.r;
    return b;
}

double SeriesRLLine::nominal_time_constant() const { return p_.l / p_.r / frame_.omega_base; }

} // namespace gridemt
