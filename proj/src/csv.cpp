// csv.cpp: CSV writers and JSON manifest output.

#include "topobatt/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "topobatt/errors.hpp"

namespace topobatt {

std::string format_number(double x)
{
    if (std::isnan(x)) {
        return "nan";
    }
    if (x == 0.0) {
        return "0";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_number(const std::optional<double>& x)
{
    return x ? format_number(*x) : std::string();
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') {
            q += '"';
        }
        q += c;
    }
    return q + '"';
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size())
{
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields)
{
    if (fields.size() != columns_) {
        throw Error("CSV row width does not match the header");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        out_ << (i ? "," : "") << csv_field(fields[i]);
    }
    out_ << '\n';
}

void write_bound_states_csv(std::ostream& out, const std::vector<BoundState>& poles)
{
    CsvWriter w(out, {"energy_re", "energy_im", "res_re", "res_im", "res_abs", "multiplicity", "kind"});
    for (const auto& p : poles) {
        w.row({format_number(p.energy.real()), format_number(p.energy.imag()), format_number(p.residue.real()),
               format_number(p.residue.imag()), format_number(std::abs(p.residue)),
               std::to_string(p.multiplicity), to_string(p.kind)});
    }
}

void write_dynamics_csv(std::ostream& out, const AmplitudeTrace& trace, const IndicatorSeries& ind)
{
    CsvWriter w(out, {"t", "re_cB", "im_cB", "abs2_cB", "re_cC", "im_cC", "norm", "p_loss", "energy",
                      "ergotropy", "power"});
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        w.row({format_number(trace.times[i]), format_number(trace.c_B[i].real()),
               format_number(trace.c_B[i].imag()), format_number(std::norm(trace.c_B[i])),
               format_number(trace.c_C[i].real()), format_number(trace.c_C[i].imag()),
               format_number(trace.norm[i]), format_number(trace.p_loss[i]), format_number(ind.energy[i]),
               format_number(ind.ergotropy[i]), format_number(ind.power[i])});
    }
}

void write_sweep_csv(std::ostream& out, const PhaseGrid& grid)
{
    CsvWriter w(out, {"delta", "g", "value", "n_bound", "flags"});
    for (std::size_t i = 0; i < grid.delta_axis.size(); ++i) {
        for (std::size_t j = 0; j < grid.g_axis.size(); ++j) {
            const std::size_t k = grid.at(i, j);
            w.row({format_number(grid.delta_axis[i]), format_number(grid.g_axis[j]), format_number(grid.values[k]),
                   std::to_string(grid.n_bound[k]), grid.flags[k]});
        }
    }
}

void write_overlay_csv(std::ostream& out, const PhaseGrid& grid)
{
    CsvWriter w(out, {"curve", "delta", "g"});
    for (const auto& p : grid.overlays) {
        w.row({p.curve, format_number(p.delta), format_number(p.g)});
    }
}

void write_zeno_csv(std::ostream& out, const ZenoReport& report)
{
    CsvWriter w(out, {"kappa", "E0", "kappa_qze", "slow_re", "slow_im", "fast_re", "fast_im", "res_slow_abs",
                      "res_fast_abs", "max_power"});
    const double nan = std::nan("");
    for (const auto& p : report.points) {
        const cplx slow = p.slow ? p.slow->energy : cplx(nan, nan);
        const cplx fast = p.fast ? p.fast->energy : cplx(nan, nan);
        const double rs = p.slow ? std::abs(p.slow->residue) : nan;
        const double rf = p.fast ? std::abs(p.fast->residue) : nan;
        w.row({format_number(p.kappa), format_number(report.E0), format_number(report.kappa_qze),
               format_number(slow.real()), format_number(slow.imag()), format_number(fast.real()),
               format_number(fast.imag()), format_number(rs), format_number(rf),
               p.error.empty() ? format_number(p.max_power) : format_number(nan)});
    }
}

void write_json_file(const std::string& path, const nlohmann::json& j)
{
    std::ofstream f(path);
    if (!f) {
        throw ConfigError("cannot write " + path);
    }
    f << j.dump(2) << '\n';
}

} // namespace topobatt
