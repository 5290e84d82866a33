#include "gridemt/shunt_rc.hpp"

namespace gridemt {

ShuntRC::ShuntRC(const ShuntRCParams& p, const Frame& frame) : p_(p), frame_(frame) {
    if (!(p_.c > 0.0)) throw std::invalid_argument("shunt_rc: c must be > 0");
    if (!(p_.r_parallel > 0.0)) throw std::invalid_argument("shunt_rc: r_parallel must be > 0");
}

void ShuntRC::derivative(std::span<const double> x, std::span<const PortSignal> inputs,
                         const Exogenous&, double, std::span<double> dx) const {
    const double wb = frame_.omega_base;
    const double w = frame_.omega_pu;
    const Dq v{x[0], x[1]};
    const Dq f = inputs[0].value;
    dx[0] = wb / p_.c * (f.d - v.d / p_.r_parallel + w * p_.c * v.q);
    dx[1] = wb / p_.c * (f.q - v.q / p_.r_parallel - w * p_.c * v.d);
}

Eigen::MatrixXd ShuntRC::inertia_metric(std::span<const double>) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
    h(0, 0) = h(1, 1) = p_.c / frame_.omega_base;
    return h;
}

Eigen::MatrixXd ShuntRC::damping_metric(std::span<const double>, const Exogenous&) const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(2, 2);
    b(0, 0) = b(1, 1) = 2.0 / p_.r_parallel;
    return b;
}

double ShuntRC::nominal_time_constant() const {
    return p_.c * p_.r_parallel / frame_.omega_base;
}

} // namespace gridemt
