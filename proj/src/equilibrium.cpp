#include "gridemt/equilibrium.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "gridemt/log.hpp"

namespace gridemt {

SystemSpec with_gov_p_ref(SystemSpec spec, int machine_index, double p_ref) {
    auto& params = spec.components.at(static_cast<std::size_t>(machine_index)).params;
    auto* mp = std::get_if<MachineParams>(&params);
    if (mp == nullptr) {
        throw std::invalid_argument("with_gov_p_ref: component is not a machine");
    }
    mp->gov_p_ref = p_ref;
    return spec;
}

std::vector<double> flat_start(const CompositeSystem& sys, double v_mag) {
    std::vector<double> x(static_cast<std::size_t>(sys.state_dim()), 0.0);
    for (int ci = 0; ci < sys.component_count(); ++ci) {
        sys.component(ci).flat_start(sys.component_state(std::span<double>(x), ci), v_mag);
    }
    return x;
}

namespace {

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace

EquilibriumResult find_equilibrium(const SystemSpec& spec, int slack_machine, const Exogenous& exo,
                                   std::span<const double> x_guess,
                                   const EquilibriumOptions& opt) {
    const bool slack = slack_machine >= 0;
    int delta_slot = -1;
    double delta_pin = 0.0;
    double p_ref_init = 0.0;
    if (slack) {
        const auto* mp = std::get_if<MachineParams>(
            &spec.components.at(static_cast<std::size_t>(slack_machine)).params);
        if (mp == nullptr) {
            throw std::invalid_argument("find_equilibrium: slack component is not a machine");
        }
        p_ref_init = mp->gov_p_ref;
    }

    CompositeSystem base{spec};
    const auto n = static_cast<std::size_t>(base.state_dim());
    if (x_guess.size() != n) {
        throw std::invalid_argument("find_equilibrium: guess has wrong dimension");
    }
    if (slack) {
        delta_slot = base.state_offset(slack_machine) + Machine::kDelta;
        delta_pin = x_guess[static_cast<std::size_t>(delta_slot)];
    }

    // Unknown vector z equals the state, except that the slack machine's
    // angle slot carries its governor reference instead (the angle is pinned).
    std::vector<double> z(x_guess.begin(), x_guess.end());
    if (slack) {
        z[static_cast<std::size_t>(delta_slot)] = p_ref_init;
    }

    std::unique_ptr<CompositeSystem> sys = std::make_unique<CompositeSystem>(spec);
    double sys_p_ref = p_ref_init;
    auto system_for = [&](double p_ref) -> const CompositeSystem& {
        if (!slack) {
            return *sys;
        }
        if (p_ref != sys_p_ref) {
            sys = std::make_unique<CompositeSystem>(with_gov_p_ref(spec, slack_machine, p_ref));
            sys_p_ref = p_ref;
        }
        return *sys;
    };

    std::vector<double> x(n), f(n);
    auto eval = [&](std::span<const double> zv, std::span<double> out) {
        std::copy(zv.begin(), zv.end(), x.begin());
        double p_ref = sys_p_ref;
        if (slack) {
            p_ref = zv[static_cast<std::size_t>(delta_slot)];
            x[static_cast<std::size_t>(delta_slot)] = delta_pin;
        }
        system_for(p_ref).derivative(0.0, x, exo, out);
    };

    EquilibriumResult res;
    eval(z, f);
    double fnorm = inf_norm(f);

    Eigen::MatrixXd jac(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<double> zp(n), fp(n), fm(n), z_try(n), f_try(n);

    int it = 0;
    for (; it < opt.max_iterations && fnorm > opt.tolerance; ++it) {
        // central-difference Jacobian, column by column
        for (std::size_t j = 0; j < n; ++j) {
            const double h = opt.fd_step * std::max(1.0, std::abs(z[j]));
            std::copy(z.begin(), z.end(), zp.begin());
            zp[j] = z[j] + h;
            eval(zp, fp);
            zp[j] = z[j] - h;
            eval(zp, fm);
            for (std::size_t i = 0; i < n; ++i) {
                jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd dz = jac.colPivHouseholderQr().solve(rhs);
        if (!dz.allFinite()) {
            log::warn("equilibrium: singular Jacobian at iteration %d", it);
            break;
        }

        double scale = 1.0;
        bool improved = false;
        for (int halving = 0; halving <= opt.max_halvings; ++halving) {
            for (std::size_t i = 0; i < n; ++i) {
                z_try[i] = z[i] + scale * dz(static_cast<Eigen::Index>(i));
            }
            eval(z_try, f_try);
            const double f_try_norm = inf_norm(f_try);
            if (f_try_norm < fnorm || f_try_norm <= opt.tolerance) {
                std::copy(z_try.begin(), z_try.end(), z.begin());
                std::copy(f_try.begin(), f_try.end(), f.begin());
                fnorm = f_try_norm;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) {
            log::debug("equilibrium: line search stalled at iteration %d, |f|=%.3e", it, fnorm);
            break;
        }
    }

    res.iterations = it;
    res.residual_inf = fnorm;
    res.converged = fnorm <= opt.tolerance;
    res.x.assign(z.begin(), z.end());
    if (slack) {
        res.slack_p_ref = z[static_cast<std::size_t>(delta_slot)];
        res.x[static_cast<std::size_t>(delta_slot)] = delta_pin;
    }
    return res;
}

} // namespace gridemt
