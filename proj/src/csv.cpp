#include "gridemt/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "gridemt/energy.hpp"

namespace gridemt {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("csv: cannot write '" + path + "'");
    return out;
}

} // namespace

std::string csv_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_trace_csv(const std::string& path, const CompositeSystem& sys, const Trace& trace) {
    std::ofstream out = open_out(path);

    out << "t";
    for (int ci = 0; ci < sys.component_count(); ++ci) {
        const Component& c = sys.component(ci);
        const std::string name(sys.component_name(ci));
        for (int s = 0; s < c.state_dim(); ++s) {
            out << "," << name << "." << c.state_name(s);
        }
    }
    for (int ci = 0; ci < sys.component_count(); ++ci) {
        const Component& c = sys.component(ci);
        const std::string name(sys.component_name(ci));
        for (int p = 0; p < c.port_count(); ++p) {
            const std::string port = name + ".p" + std::to_string(p) + ".";
            out << "," << port << "e_d," << port << "e_q," << port << "f_d," << port << "f_q,"
                << port << "de_d," << port << "de_q," << port << "df_d," << port << "df_q";
        }
    }
    for (int ci = 0; ci < sys.component_count(); ++ci) {
        const std::string name(sys.component_name(ci));
        out << "," << name << ".E," << name << ".D," << name << ".tau," << name << ".E_t,"
            << name << ".p," << name << ".P," << name << ".Qdot";
    }
    out << ",tellegen.P,tellegen.Pdot,tellegen.Qdot\n";

    for (std::size_t k = 0; k < trace.samples(); ++k) {
        out << csv_number(trace.times[k]);
        for (double v : trace.state(k)) out << "," << csv_number(v);
        for (const PortVariables& pv : trace.port_row(k)) {
            out << "," << csv_number(pv.e.d) << "," << csv_number(pv.e.q) << ","
                << csv_number(pv.f.d) << "," << csv_number(pv.f.q) << ","
                << csv_number(pv.de_dt.d) << "," << csv_number(pv.de_dt.q) << ","
                << csv_number(pv.df_dt.d) << "," << csv_number(pv.df_dt.q);
        }
        for (const EnergySnapshot& es : trace.energy_row(k)) {
            out << "," << csv_number(es.stored) << "," << csv_number(es.dissipated) << ","
                << csv_number(es.tau) << "," << csv_number(es.tangent) << ","
                << csv_number(es.e_rate) << "," << csv_number(es.port_power) << ","
                << csv_number(es.port_qdot);
        }
        const TellegenReport tr = tellegen_residuals(trace.port_row(k));
        out << "," << csv_number(tr.residual_power) << "," << csv_number(tr.residual_power_rate)
            << "," << csv_number(tr.residual_qdot) << "\n";
    }
}

void write_pv_csv(const std::string& path, std::span<const PVPoint> points) {
    std::ofstream out = open_out(path);
    out << "r_load,v_load,p_load,feasible,stable,diverged,branch\n";
    for (const PVPoint& pt : points) {
        out << csv_number(pt.r_load) << "," << csv_number(pt.v_load) << ","
            << csv_number(pt.p_load) << "," << (pt.feasible ? 1 : 0) << ","
            << (pt.stable ? 1 : 0) << "," << (pt.diverged ? 1 : 0) << "," << pt.branch << "\n";
    }
}

void write_loadability_csv(const std::string& path, std::span<const LoadabilityRow> rows) {
    std::ofstream out = open_out(path);
    out << "t,lhs,rhs,margin,sdot,supply,sdot_boundary,tau_line\n";
    for (const LoadabilityRow& r : rows) {
        out << csv_number(r.t) << "," << csv_number(r.lhs) << "," << csv_number(r.rhs) << ","
            << csv_number(r.margin) << "," << csv_number(r.storage_rate) << ","
            << csv_number(r.supply) << "," << csv_number(r.sdot_boundary) << ","
            << csv_number(r.tau_tl) << "\n";
    }
}

void write_spectrum_csv(const std::string& path, const Spectrum& spectrum) {
    std::ofstream out = open_out(path);
    out << "freq_hz,energy\n";
    for (std::size_t k = 0; k < spectrum.freq_hz.size(); ++k) {
        out << csv_number(spectrum.freq_hz[k]) << "," << csv_number(spectrum.energy[k]) << "\n";
    }
}

} // namespace gridemt
