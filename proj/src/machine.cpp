#include "gridemt/machine.hpp"

#include <cmath>

namespace gridemt {

namespace {

void check_positive(double v, const char* name) {
    if (!(v > 0.0)) {
        throw std::invalid_argument(std::string("machine: ") + name + " must be > 0");
    }
}

MachineCircuit synthesize(const MachineParams& p, double omega_base) {
    // reactance ordering x > x' > x'' > x_l is required for a realizable circuit
    if (!(p.x_d > p.x_d_t && p.x_d_t > p.x_d_st && p.x_d_st > p.x_l && p.x_l > 0.0)) {
        throw std::invalid_argument("machine: need x_d > x_d_t > x_d_st > x_l > 0");
    }
    if (!(p.x_q > p.x_q_t && p.x_q_t > p.x_q_st && p.x_q_st > p.x_l)) {
        throw std::invalid_argument("machine: need x_q > x_q_t > x_q_st > x_l");
    }
    if (!(p.r_s >= 0.0)) {
        throw std::invalid_argument("machine: r_s must be >= 0");
    }
    if (!(p.t_d0_t > p.t_d0_st && p.t_d0_st > 0.0)) {
        throw std::invalid_argument("machine: need t_d0_t > t_d0_st > 0");
    }
    if (!(p.t_q0_t > p.t_q0_st && p.t_q0_st > 0.0)) {
        throw std::invalid_argument("machine: need t_q0_t > t_q0_st > 0");
    }

    MachineCircuit c{};
    c.l_ad = p.x_d - p.x_l;
    c.l_aq = p.x_q - p.x_l;
    c.l_fl = 1.0 / (1.0 / (p.x_d_t - p.x_l) - 1.0 / c.l_ad);
    c.r_f = (c.l_ad + c.l_fl) / (omega_base * p.t_d0_t);
    c.l_kdl = 1.0 / (1.0 / (p.x_d_st - p.x_l) - 1.0 / c.l_ad - 1.0 / c.l_fl);
    c.r_kd =
        (c.l_kdl + c.l_ad * c.l_fl / (c.l_ad + c.l_fl)) / (omega_base * p.t_d0_st);
    c.l_kql = 1.0 / (1.0 / (p.x_q_st - p.x_l) - 1.0 / c.l_aq);
    c.r_kq = (c.l_kql + c.l_aq) / (omega_base * p.t_q0_st);

    check_positive(c.l_fl, "synthesized field leakage");
    check_positive(c.l_kdl, "synthesized d-damper leakage");
    check_positive(c.l_kql, "synthesized q-damper leakage");
    return c;
}

} // namespace

Machine::Machine(const MachineParams& p, const Frame& frame)
    : p_(p), c_(synthesize(p, frame.omega_base)), frame_(frame) {
    check_positive(p.inertia_j, "inertia_j");
    if (!(p.damping_d >= 0.0)) {
        throw std::invalid_argument("machine: damping_d must be >= 0");
    }
    check_positive(p.gov_t, "gov_t");
    check_positive(p.exc_t, "exc_t");
    check_positive(p.exc_t2, "exc_t2");
    check_positive(frame.omega_base, "omega_base");

    // flux/current maps over motor-convention current vectors
    // d-axis: columns act on (-i_d, i_f, i_kd)
    Eigen::Matrix3d md;
    md << p.x_d, c_.l_ad, c_.l_ad,               //
        c_.l_ad, c_.l_ad + c_.l_fl, c_.l_ad,     //
        c_.l_ad, c_.l_ad, c_.l_ad + c_.l_kdl;
    md_inv_ = md.inverse();
    Eigen::Matrix2d mq;
    mq << p.x_q, c_.l_aq,  //
        c_.l_aq, c_.l_aq + c_.l_kql;
    mq_inv_ = mq.inverse();

    const double wb = frame_.omega_base;
    h_ = Eigen::MatrixXd::Zero(10, 10);
    h_(kOmega, kOmega) = p.inertia_j;
    h_.block<3, 3>(kPsiD, kPsiD).setZero();
    // flux blocks: the magnetic co-energy is 1/2 psi^T Minv psi, scaled by
    // 1/omega_base because fluxes integrate omega_base * voltage
    Eigen::Matrix3d hd = md_inv_ / wb;
    Eigen::Matrix2d hq = mq_inv_ / wb;
    // state ordering interleaves the axes: psi_d, psi_q, psi_f, psi_kd, psi_kq
    const int dmap[3] = {kPsiD, kPsiF, kPsiKd};
    const int qmap[2] = {kPsiQ, kPsiKq};
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            h_(dmap[a], dmap[b]) = hd(a, b);
        }
    }
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            h_(qmap[a], qmap[b]) = hq(a, b);
        }
    }

    // damping metric doubled so 1/2 x^T B x equals total dissipated power
    b_ = Eigen::MatrixXd::Zero(10, 10);
    b_(kOmega, kOmega) = 2.0 * p.damping_d;
    Eigen::Matrix3d rd = Eigen::Vector3d(p.r_s, c_.r_f, c_.r_kd).asDiagonal();
    Eigen::Matrix2d rq = Eigen::Vector2d(p.r_s, c_.r_kq).asDiagonal();
    Eigen::Matrix3d bd = 2.0 * md_inv_.transpose() * rd * md_inv_;
    Eigen::Matrix2d bq = 2.0 * mq_inv_.transpose() * rq * mq_inv_;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            b_(dmap[a], dmap[b]) = bd(a, b);
        }
    }
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            b_(qmap[a], qmap[b]) = bq(a, b);
        }
    }
}

std::string_view Machine::state_name(int i) const {
    static constexpr std::array<std::string_view, 10> names = {
        "delta", "omega", "psi_d", "psi_q", "psi_f", "psi_kd", "psi_kq", "p_mech", "v_r", "e_fd"};
    return names.at(static_cast<std::size_t>(i));
}

Machine::Currents Machine::currents(std::span<const double> x) const {
    Eigen::Vector3d cd = md_inv_ * Eigen::Vector3d(x[kPsiD], x[kPsiF], x[kPsiKd]);
    Eigen::Vector2d cq = mq_inv_ * Eigen::Vector2d(x[kPsiQ], x[kPsiKq]);
    return Currents{-cd(0), -cq(0), cd(1), cd(2), cq(1)};
}

double Machine::electrical_torque(std::span<const double> x) const {
    const Currents c = currents(x);
    return x[kPsiD] * c.i_q - x[kPsiQ] * c.i_d;
}

void Machine::port_flows(std::span<const double> x, std::span<const Dq>, const Exogenous&, double,
                         std::span<Dq> flows) const {
    const Currents c = currents(x);
    // stator current is out of the machine; port flow is into the port
    flows[0] = -rotate(Dq{c.i_d, c.i_q}, x[kDelta]);
}

void Machine::derivative(std::span<const double> x, std::span<const PortSignal> inputs,
                         const Exogenous& exo, double, std::span<double> dx) const {
    const double wb = frame_.omega_base;
    const Dq e_bus = inputs[0].value;
    const Dq v_m = rotate(e_bus, -x[kDelta]);
    const Currents c = currents(x);
    const double omega_m = frame_.omega_pu + x[kOmega];
    const double omega_safe = std::max(omega_m, 0.1);

    dx[kDelta] = wb * x[kOmega];
    const double t_e = x[kPsiD] * c.i_q - x[kPsiQ] * c.i_d;
    const double t_m = x[kPMech] / omega_safe;
    dx[kOmega] = (t_m - t_e - p_.damping_d * x[kOmega]) / p_.inertia_j;

    // stator flux dynamics in the rotor frame (generator current convention)
    dx[kPsiD] = wb * (v_m.d + p_.r_s * c.i_d + omega_m * x[kPsiQ]);
    dx[kPsiQ] = wb * (v_m.q + p_.r_s * c.i_q - omega_m * x[kPsiD]);

    const double v_f = c_.r_f * x[kEfd] / c_.l_ad;
    dx[kPsiF] = wb * (v_f - c_.r_f * c.i_f);
    dx[kPsiKd] = -wb * c_.r_kd * c.i_kd;
    dx[kPsiKq] = -wb * c_.r_kq * c.i_kq;

    dx[kPMech] = (p_.gov_p_ref - p_.gov_k * x[kOmega] - x[kPMech]) / p_.gov_t;
    const double v_target = p_.exc_v_ref + exo.exciter_ref_offset;
    const Dq e_comp{v_m.d - p_.exc_rc * c.i_d + p_.exc_xc * c.i_q,
                    v_m.q - p_.exc_rc * c.i_q - p_.exc_xc * c.i_d};
    dx[kVr] = (p_.exc_k * (v_target - magnitude(e_comp)) - x[kVr]) / p_.exc_t;
    dx[kEfd] = (x[kVr] - x[kEfd]) / p_.exc_t2;
}

void Machine::port_records(std::span<const double> x, std::span<const double> dx,
                           std::span<const Dq> efforts, std::span<const Dq> effort_rates,
                           std::span<const Dq> flows, std::span<const Dq>, const Exogenous&,
                           double, std::span<PortVariables> out) const {
    // machine-frame current rates follow the flux rates through the constant maps
    Eigen::Vector3d dcd = md_inv_ * Eigen::Vector3d(dx[kPsiD], dx[kPsiF], dx[kPsiKd]);
    Eigen::Vector2d dcq = mq_inv_ * Eigen::Vector2d(dx[kPsiQ], dx[kPsiKq]);
    const Dq di_m{-dcd(0), -dcq(0)};
    const Currents c = currents(x);
    const Dq i_m{c.i_d, c.i_q};
    // d/dt [ -R(delta) i_m ] = -R(delta) di_m - ddelta * R(delta) J i_m
    const Dq j_i{-i_m.q, i_m.d};
    const Dq df = (rotate(di_m, x[kDelta]) + rotate(j_i, x[kDelta]) * dx[kDelta]) * -1.0;
    out[0] = PortVariables{efforts[0], flows[0], effort_rates[0], df};
}

Eigen::MatrixXd Machine::inertia_metric(std::span<const double>) const { return h_; }

Eigen::MatrixXd Machine::damping_metric(std::span<const double>, const Exogenous&) const {
    return b_;
}

void Machine::flat_start(std::span<double> x, double v_mag) const {
    const std::array<double, 10> s = no_load_state(v_mag);
    std::copy(s.begin(), s.end(), x.begin());
}

std::array<double, 10> Machine::no_load_state(double v_mag) const {
    // open-circuit steady state: zero stator current, flux from field alone
    std::array<double, 10> x{};
    x[kDelta] = 0.0;
    x[kOmega] = 0.0;
    x[kPsiD] = v_mag;    // omega_m * psi_d = v_q ~ v_mag at delta aligning q with e
    x[kPsiQ] = 0.0;
    x[kEfd] = v_mag;     // i_f = E_fd / l_ad gives psi_d = l_ad * i_f = E_fd
    x[kVr] = x[kEfd];    // regulator holds the exciter stage at its set point
    x[kPsiF] = (c_.l_ad + c_.l_fl) * (x[kEfd] / c_.l_ad);
    x[kPsiKd] = c_.l_ad * (x[kEfd] / c_.l_ad);
    x[kPsiKq] = 0.0;
    x[kPMech] = 0.0;
    return x;
}

} // namespace gridemt
