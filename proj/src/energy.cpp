#include "gridemt/energy.hpp"

#include <cmath>
#include <stdexcept>

namespace gridemt {

namespace {

double quadratic_form(std::span<const double> x, const Eigen::MatrixXd& M) {
    const auto n = static_cast<Eigen::Index>(x.size());
    if (M.rows() != n || M.cols() != n)
        throw std::invalid_argument("metric dimension does not match state dimension");
    const Eigen::Map<const Eigen::VectorXd> v(x.data(), n);
    return 0.5 * v.dot(M * v);
}

} // namespace

double stored_energy(std::span<const double> x, const Eigen::MatrixXd& H) {
    return quadratic_form(x, H);
}

double dissipated_power(std::span<const double> x, const Eigen::MatrixXd& B) {
    return quadratic_form(x, B);
}

double time_constant(double E, double D) {
    if (!(D > 0.0)) throw std::domain_error("time_constant requires D > 0");
    return E / D;
}

double tangent_energy(std::span<const double> dx, const Eigen::MatrixXd& H) {
    return quadratic_form(dx, H);
}

EnergySnapshot energy_snapshot(std::span<const double> x, std::span<const double> dx,
                               std::span<const PortVariables> ports, const Eigen::MatrixXd& H,
                               const Eigen::MatrixXd& B, QdotConvention sign, double nominal_tau) {
    EnergySnapshot s;
    s.stored = stored_energy(x, H);
    s.dissipated = dissipated_power(x, B);
    s.tangent = tangent_energy(dx, H);

    const auto n = static_cast<Eigen::Index>(x.size());
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    const Eigen::Map<const Eigen::VectorXd> dv(dx.data(), n);
    s.e_rate = xv.dot(H * dv);

    // tau = 2E/D (the L/R convention); parameter-level fallback when the state
    // carries no energy or the component is lossless.
    s.tau = (s.dissipated > 0.0 && s.stored > 0.0) ? time_constant(2.0 * s.stored, s.dissipated)
                                                   : nominal_tau;

    for (const auto& pv : ports) {
        s.port_power += port_power(pv);
        s.port_qdot += port_qdot(pv, sign);
    }
    return s;
}

std::vector<double> finite_difference(std::span<const double> y, double dt) {
    const std::size_t n = y.size();
    if (n < 3) throw std::invalid_argument("finite_difference needs at least 3 samples");
    if (!(dt > 0.0)) throw std::invalid_argument("finite_difference needs dt > 0");
    std::vector<double> d(n, 0.0);
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dt);
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * dt);
    if (n >= 5) {
        d[1] = (y[2] - y[0]) / (2.0 * dt);
        d[n - 2] = (y[n - 1] - y[n - 3]) / (2.0 * dt);
        for (std::size_t k = 2; k + 2 < n; ++k)
            d[k] = (-y[k + 2] + 8.0 * y[k + 1] - 8.0 * y[k - 1] + y[k - 2]) / (12.0 * dt);
    } else {
        for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (y[k + 1] - y[k - 1]) / (2.0 * dt);
    }
    return d;
}

BalanceResiduals energy_balance_residuals(std::span<const double> E, std::span<const double> D,
                                          std::span<const double> P, std::span<const double> p,
                                          std::span<const double> Et, std::span<const double> Qd,
                                          double dt) {
    const std::size_t n = E.size();
    if (n < 3) throw std::invalid_argument("energy_balance_residuals needs at least 3 samples");
    if (D.size() != n || P.size() != n || p.size() != n || Et.size() != n || Qd.size() != n)
        throw std::invalid_argument("energy_balance_residuals: series length mismatch");

    const std::vector<double> dE = finite_difference(E, dt);
    const std::vector<double> dp = finite_difference(p, dt);

    BalanceResiduals out;
    // Endpoints use one-sided stencils of lower order; skip them. With the
    // 4th-order interior stencil also skip the 2nd-order near-boundary points.
    const std::size_t lo = (n >= 5) ? 2 : 1;
    const std::size_t hi = n - lo;
    out.r1.reserve(hi - lo);
    out.r2.reserve(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
        const double r1 = dE[k] - (P[k] - D[k]);
        const double r2 = dp[k] - (4.0 * Et[k] - Qd[k]);
        out.r1.push_back(r1);
        out.r2.push_back(r2);
        out.max_abs_r1 = std::max(out.max_abs_r1, std::abs(r1));
        out.max_abs_r2 = std::max(out.max_abs_r2, std::abs(r2));
    }
    return out;
}

TellegenReport tellegen_residuals(std::span<const PortVariables> all_ports) {
    TellegenReport r;
    double sum_p = 0.0, sum_pdot = 0.0, sum_qdot = 0.0;
    for (const auto& pv : all_ports) {
        const double pw = port_power(pv);
        sum_p += pw;
        sum_pdot += port_power_rate(pv);
        sum_qdot += port_qdot_uniform(pv);
        r.scale += std::abs(pw);
    }
    r.residual_power = std::abs(sum_p);
    r.residual_power_rate = std::abs(sum_pdot);
    r.residual_qdot = std::abs(sum_qdot);
    return r;
}

} // namespace gridemt
