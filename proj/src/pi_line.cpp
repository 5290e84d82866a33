#include "gridemt/pi_line.hpp"

namespace gridemt {

namespace {
constexpr const char* kStateNames[6] = {"i_d", "i_q", "v1_d", "v1_q", "v2_d", "v2_q"};
}

PiLine::PiLine(const PiLineParams& p, const Frame& frame) : p_(p), frame_(frame) {
    if (!(p_.r > 0.0)) throw std::invalid_argument("pi_line: r must be > 0");
    if (!(p_.l > 0.0)) throw std::invalid_argument("pi_line: l must be > 0");
    if (!(p_.c > 0.0)) throw std::invalid_argument("pi_line: c must be > 0");
}

std::string_view PiLine::state_name(int i) const { return kStateNames[i]; }

Dq PiLine::owned_effort(std::span<const double> x, int port) const {
    return port == 0 ? Dq{x[2], x[3]} : Dq{x[4], x[5]};
}

Dq PiLine::shunt_draw(std::span<const double> x, int port) const {
    // Series current leaves bus 1 and enters bus 2.
    const Dq i{x[0], x[1]};
    return port == 0 ? i : -i;
}

Dq PiLine::shunt_draw_rate(std::span<const double>, std::span<const double> dx, int port) const {
    const Dq di{dx[0], dx[1]};
    return port == 0 ? di : -di;
}

void PiLine::derivative(std::span<const double> x, std::span<const PortSignal> inputs,
                        const Exogenous&, double, std::span<double> dx) const {
    const double wb = frame_.omega_base;
    const double w = frame_.omega_pu;
    const Dq i{x[0], x[1]};
    const Dq v1{x[2], x[3]};
    const Dq v2{x[4], x[5]};
    const Dq f1 = inputs[0].value;
    const Dq f2 = inputs[1].value;

    dx[0] = wb / p_.l * (v1.d - v2.d - p_.r * i.d + w * p_.l * i.q);
    dx[1] = wb / p_.l * (v1.q - v2.q - p_.r * i.q - w * p_.l * i.d);

    const double ch = 0.5 * p_.c;
    dx[2] = wb / ch * (f1.d - i.d + w * ch * v1.q);
    dx[3] = wb / ch * (f1.q - i.q - w * ch * v1.d);
    dx[4] = wb / ch * (f2.d + i.d + w * ch * v2.q);
    dx[5] = wb / ch * (f2.q + i.q - w * ch * v2.d);
}

Eigen::MatrixXd PiLine::inertia_metric(std::span<const double>) const {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(6, 6);
    const double wb = frame_.omega_base;
    h(0, 0) = h(1, 1) = p_.l / wb;
    h(2, 2) = h(3, 3) = h(4, 4) = h(5, 5) = 0.5 * p_.c / wb;
    return h;
}

Eigen::MatrixXd PiLine::damping_metric(std::span<const double>, const Exogenous&) const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(6, 6);
    b(0, 0) = b(1, 1) = 2.0 * p_.r;
    return b;
}

double PiLine::nominal_time_constant() const { return p_.l / p_.r / frame_.omega_base; }

void PiLine::flat_start(std::span<double> x, double v_mag) const {
    x[0] = x[1] = 0.0;
    x[2] = x[4] = 0.0;
    x[3] = x[5] = v_mag;
}

} // namespace gridemt
