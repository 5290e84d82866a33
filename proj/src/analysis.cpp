#include "gridemt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "gridemt/log.hpp"

namespace gridemt {

namespace {

/// Component time constant for boundary bookkeeping at one sample.
double bookkeeping_tau(const Component& c, const EnergySnapshot& snap) {
    if (c.role() == ComponentRole::pq_source) {
        return c.nominal_time_constant();
    }
    if (snap.dissipated > 1e-14 && snap.stored > 1e-14) {
        return snap.stored / snap.dissipated;
    }
    return 0.5 * c.nominal_time_constant();
}

struct BoundaryTerms {
    double p = 0.0;
    double pdot = 0.0;
    double qdot = 0.0;  ///< uniform convention
};

BoundaryTerms component_terms(const CompositeSystem& sys, const Trace& trace, std::size_t k,
                              int ci) {
    BoundaryTerms out;
    const auto row = trace.port_row(k);
    const auto off = static_cast<std::size_t>(sys.port_offset(ci));
    const auto pc = static_cast<std::size_t>(sys.component(ci).port_count());
    for (std::size_t p = 0; p < pc; ++p) {
        const PortVariables& pv = row[off + p];
        out.p += port_power(pv);
        out.pdot += port_power_rate(pv);
        out.qdot += port_qdot_uniform(pv);
    }
    return out;
}

bool is_boundary_load(ComponentRole r) { return r == ComponentRole::load; }
bool is_boundary_gen(ComponentRole r) {
    return r == ComponentRole::generator || r == ComponentRole::pq_source;
}

/// Common line time constant; warns when lines disagree beyond 1%.
double common_line_tau(const CompositeSystem& sys, const Trace& trace, std::size_t k) {
    double tau = 0.0, lo = 0.0, hi = 0.0;
    int count = 0;
    const auto row = trace.energy_row(k);
    for (int ci = 0; ci < sys.component_count(); ++ci) {
        if (sys.component(ci).role() != ComponentRole::transmission_line) {
            continue;
        }
        const double ti = bookkeeping_tau(sys.component(ci), row[static_cast<std::size_t>(ci)]);
        tau += ti;
        lo = count == 0 ? ti : std::min(lo, ti);
        hi = count == 0 ? ti : std::max(hi, ti);
        ++count;
    }
    if (count == 0) {
        throw std::invalid_argument("loadability: network has no transmission line");
    }
    tau /= count;
    if (hi - lo > 0.01 * tau) {
        log::warn("loadability: line time constants spread %.2f%% around %.3e s",
                  100.0 * (hi - lo) / tau, tau);
    }
    return tau;
}

} // namespace

double storage_rate(const CompositeSystem& sys, const Trace& trace, std::size_t k) {
    double sum = 0.0;
    const auto row = trace.energy_row(k);
    for (int ci = 0; ci < sys.component_count(); ++ci) {
        if (sys.component(ci).role() == ComponentRole::transmission_line) {
            sum += row[static_cast<std::size_t>(ci)].tangent;
        }
    }
    return 4.0 * sum;
}

double supply_rate(const CompositeSystem& sys, const Trace& trace, std::size_t k) {
    double s = 0.0;
    const auto row = trace.energy_row(k);
    for (int ci = 0; ci < sys.component_count(); ++ci) {
        const Component& c = sys.component(ci);
        if (!is_boundary_gen(c.role()) && !is_boundary_load(c.role())) {
            continue;
        }
        const BoundaryTerms bt = component_terms(sys, trace, k, ci);
        s -= bt.p / bookkeeping_tau(c, row[static_cast<std::size_t>(ci)]);
    }
    return s;
}

double sdot_boundary_form(const CompositeSystem& sys, const Trace& trace, std::size_t k) {
    return loadability_row(sys, trace, k).sdot_boundary;
}

LoadabilityRow loadability_row(const CompositeSystem& sys, const Trace& trace, std::size_t k) {
    LoadabilityRow row;
    row.t = trace.times[k];
    row.tau_tl = common_line_tau(sys, trace, k);
    const double inv_tl = 1.0 / row.tau_tl;
    const auto energy = trace.energy_row(k);

    double line_energy_term = 0.0;
    double gen_rate = 0.0, load_rate = 0.0;   // sum (Pdot + Qdot)
    double gen_port = 0.0, load_port = 0.0;   // sum P / tau_tl at the boundary
    double supply = 0.0;
    double lhs = 0.0, gen_weighted = 0.0;

    for (int ci = 0; ci < sys.component_count(); ++ci) {
        const Component& c = sys.component(ci);
        const ComponentRole role = c.role();
        if (role == ComponentRole::transmission_line) {
            line_energy_term += energy[static_cast<std::size_t>(ci)].stored * inv_tl * inv_tl;
            row.storage_rate += 4.0 * energy[static_cast<std::size_t>(ci)].tangent;
            continue;
        }
        const BoundaryTerms bt = component_terms(sys, trace, k, ci);
        const double tau = bookkeeping_tau(c, energy[static_cast<std::size_t>(ci)]);
        supply -= bt.p / tau;
        if (is_boundary_load(role)) {
            load_rate += bt.pdot + bt.qdot;
            load_port += bt.p * inv_tl;
            lhs += (inv_tl + 1.0 / tau) * bt.p;
        } else if (is_boundary_gen(role)) {
            gen_rate += bt.pdot + bt.qdot;
            gen_port += bt.p * inv_tl;
            gen_weighted += (inv_tl + 1.0 / tau) * bt.p;
        }
    }

    row.lhs = lhs;
    row.rhs = -line_energy_term + load_rate + gen_rate - gen_weighted;
    row.margin = row.rhs - row.lhs;
    row.supply = supply;
    row.sdot_boundary = line_energy_term - (gen_rate - gen_port) - (load_rate - load_port);
    return row;
}

std::vector<LoadabilityRow> loadability_report(const CompositeSystem& sys, const Trace& trace) {
    std::vector<LoadabilityRow> rows;
    rows.reserve(trace.samples());
    for (std::size_t k = 0; k < trace.samples(); ++k) {
        rows.push_back(loadability_row(sys, trace, k));
    }
    return rows;
}

// -----------------------------------------------------------------------------
// Delta bound
// -----------------------------------------------------------------------------

namespace {

std::size_t sample_index(const Trace& trace, double t) {
    const auto it = std::lower_bound(trace.times.begin(), trace.times.end(), t - 1e-12);
    if (it == trace.times.end()) {
        return trace.samples() - 1;
    }
    return static_cast<std::size_t>(it - trace.times.begin());
}

/// P + Q summed over one component's ports at one sample.
double pq_total(const CompositeSystem& sys, const Trace& trace, std::size_t k, int ci) {
    double v = 0.0;
    const auto row = trace.port_row(k);
    const auto off = static_cast<std::size_t>(sys.port_offset(ci));
    const auto pc = static_cast<std::size_t>(sys.component(ci).port_count());
    for (std::size_t p = 0; p < pc; ++p) {
        v += dot(row[off + p].e, row[off + p].f) + cross(row[off + p].e, row[off + p].f);
    }
    return v;
}

} // namespace

DeltaBoundReport loadability_delta_bound(const CompositeSystem& sys_with, const Trace& with,
                                         const CompositeSystem& sys_without, const Trace& without,
                                         double t0, double t1,
                                         std::span<const std::string> support_components) {
    const std::size_t kw0 = sample_index(with, t0), kw1 = sample_index(with, t1);
    const std::size_t ko0 = sample_index(without, t0), ko1 = sample_index(without, t1);
    if (std::abs(with.times[kw0] - without.times[ko0]) > 1e-9 ||
        std::abs(with.times[kw1] - without.times[ko1]) > 1e-9) {
        throw std::invalid_argument("delta bound: traces do not share the record grid");
    }

    DeltaBoundReport rep;
    for (int ci = 0; ci < sys_with.component_count(); ++ci) {
        const Component& c = sys_with.component(ci);
        if (c.role() == ComponentRole::transmission_line) {
            continue;
        }
        const std::string& name = sys_with.component_name(ci);
        const int co = sys_without.find_component(name);

        auto delta_at = [&](std::size_t kw, std::size_t ko) {
            const double w = pq_total(sys_with, with, kw, ci);
            const double o = co >= 0 ? pq_total(sys_without, without, ko, co) : 0.0;
            return w - o;
        };
        DeltaContribution dc;
        dc.component = name;
        dc.delta = delta_at(kw1, ko1) - delta_at(kw0, ko0);
        dc.support = std::find(support_components.begin(), support_components.end(), name) !=
                     support_components.end();
        if (dc.support) {
            rep.support_delta += dc.delta;
        }
        rep.per_component.push_back(std::move(dc));
    }
    rep.bound = std::abs(rep.support_delta);
    return rep;
}

// -----------------------------------------------------------------------------
// Stability classification
// -----------------------------------------------------------------------------

StabilityVerdict classify_stability(const Trace& trace, std::span<const double> reference,
                                    double window_start, const StabilityCriterion& crit) {
    if (trace.diverged) {
        return StabilityVerdict::unstable;
    }
    if (reference.size() != static_cast<std::size_t>(trace.state_dim)) {
        throw std::invalid_argument("classify_stability: reference has wrong dimension");
    }
    std::size_t k0 = trace.samples();
    for (std::size_t k = 0; k < trace.samples(); ++k) {
        if (trace.times[k] >= window_start - 1e-12) {
            k0 = k;
            break;
        }
    }
    if (k0 >= trace.samples() || trace.samples() - k0 < 16) {
        return StabilityVerdict::inconclusive;
    }
    const std::size_t n_post = trace.samples() - k0;
    const double window = trace.times.back() - trace.times[k0];

    // deviation series and the state with the largest post-window swing
    std::vector<double> dev(n_post, 0.0);
    int swing_state = 0;
    double swing_amp = -1.0;
    for (int i = 0; i < trace.state_dim; ++i) {
        double amp = 0.0;
        for (std::size_t k = k0; k < trace.samples(); ++k) {
            amp = std::max(amp, std::abs(trace.state(k)[static_cast<std::size_t>(i)] -
                                         reference[static_cast<std::size_t>(i)]));
        }
        if (amp > swing_amp) {
            swing_amp = amp;
            swing_state = i;
        }
    }
    for (std::size_t k = k0; k < trace.samples(); ++k) {
        double d = 0.0;
        for (int i = 0; i < trace.state_dim; ++i) {
            d = std::max(d, std::abs(trace.state(k)[static_cast<std::size_t>(i)] -
                                     reference[static_cast<std::size_t>(i)]));
        }
        dev[k - k0] = d;
    }

    // dominant period from sign changes of the largest-swing deviation
    int crossings = 0;
    double prev = trace.state(k0)[static_cast<std::size_t>(swing_state)] -
                  reference[static_cast<std::size_t>(swing_state)];
    for (std::size_t k = k0 + 1; k < trace.samples(); ++k) {
        const double cur = trace.state(k)[static_cast<std::size_t>(swing_state)] -
                           reference[static_cast<std::size_t>(swing_state)];
        if ((cur > 0.0) != (prev > 0.0)) {
            ++crossings;
        }
        prev = cur;
    }
    if (crossings >= 2) {
        const double dominant_period = 2.0 * window / static_cast<double>(crossings);
        if (window < crit.min_periods * dominant_period) {
            return StabilityVerdict::inconclusive;
        }
    }

    // final-band test against the reference
    const auto tail_start = static_cast<std::size_t>(
        static_cast<double>(n_post) * (1.0 - crit.final_fraction));
    double tail_max = 0.0;
    for (std::size_t k = tail_start; k < n_post; ++k) {
        tail_max = std::max(tail_max, dev[k]);
    }
    if (tail_max > crit.epsilon) {
        return StabilityVerdict::unstable;
    }

    // envelope non-increasing over the final third
    const std::size_t a = n_post - n_post / 3;
    const std::size_t b = n_post - n_post / 6;
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t k = a; k < b; ++k) {
        m1 = std::max(m1, dev[k]);
    }
    for (std::size_t k = b; k < n_post; ++k) {
        m2 = std::max(m2, dev[k]);
    }
    if (m2 > m1 * (1.0 + crit.envelope_slack) + 1e-12) {
        return StabilityVerdict::unstable;
    }
    return StabilityVerdict::stable;
}

// -----------------------------------------------------------------------------
// Spectrum
// -----------------------------------------------------------------------------

namespace {

void fft_radix2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

} // namespace

Spectrum energy_spectrum(std::span<const double> samples, double dt) {
    if (samples.size() < 8 || !(dt > 0.0)) {
        throw std::invalid_argument("energy_spectrum: need >= 8 samples and dt > 0");
    }
    const std::size_t n = samples.size();
    std::size_t nfft = 1;
    while (nfft < n) {
        nfft <<= 1;
    }
    std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
    for (std::size_t k = 0; k < n; ++k) {
        const double w =
            0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                 static_cast<double>(n - 1));
        buf[k] = samples[k] * w;
    }
    fft_radix2(buf);

    Spectrum spec;
    const std::size_t half = nfft / 2;
    spec.freq_hz.resize(half + 1);
    spec.energy.resize(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        spec.freq_hz[k] = static_cast<double>(k) / (static_cast<double>(nfft) * dt);
        spec.energy[k] = std::norm(buf[k]);
    }
    return spec;
}

Spectrum line_power_spectrum(const CompositeSystem& sys, const Trace& trace,
                             const std::string& component, double window_start,
                             double band_center_hz, double band_half_hz, double ac_min_hz) {
    const int ci = sys.find_component(component);
    if (ci < 0) {
        throw std::invalid_argument("line_power_spectrum: unknown component '" + component + "'");
    }
    std::size_t k0 = trace.samples();
    for (std::size_t k = 0; k < trace.samples(); ++k) {
        if (trace.times[k] >= window_start - 1e-12) {
            k0 = k;
            break;
        }
    }
    if (k0 + 16 > trace.samples()) {
        throw std::invalid_argument("line_power_spectrum: window has too few samples");
    }
    const double dt = trace.times[k0 + 1] - trace.times[k0];
    for (std::size_t k = k0 + 1; k < trace.samples(); ++k) {
        if (std::abs(trace.times[k] - trace.times[k - 1] - dt) > 1e-9) {
            throw std::invalid_argument("line_power_spectrum: record grid is not uniform");
        }
    }

    // stationary-frame instantaneous power at port 0 of the line
    const double w_carrier = sys.frame().omega_base * sys.frame().omega_pu;
    const auto off = static_cast<std::size_t>(sys.port_offset(ci));
    std::vector<double> p(trace.samples() - k0);
    for (std::size_t k = k0; k < trace.samples(); ++k) {
        const PortVariables& pv = trace.port_row(k)[off];
        const double t = trace.times[k];
        p[k - k0] = dot(pv.e, pv.f) * std::cos(w_carrier * t) -
                    cross(pv.e, pv.f) * std::sin(w_carrier * t);
    }

    Spectrum spec = energy_spectrum(p, dt);
    spec.band_lo_hz = band_center_hz - band_half_hz;
    spec.band_hi_hz = band_center_hz + band_half_hz;
    double total = 0.0, in_band = 0.0;
    for (std::size_t k = 0; k < spec.freq_hz.size(); ++k) {
        if (spec.freq_hz[k] < ac_min_hz) {
            continue;
        }
        total += spec.energy[k];
        if (spec.freq_hz[k] >= spec.band_lo_hz && spec.freq_hz[k] <= spec.band_hi_hz) {
            in_band += spec.energy[k];
        }
    }
    spec.in_band_fraction = total > 0.0 ? in_band / total : 0.0;
    return spec;
}

} // namespace gridemt
