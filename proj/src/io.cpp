#include "arpsim/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "arpsim/errors.hpp"

namespace arpsim {

namespace {

constexpr const char* trajectory_header = "t_us,P_g,P_i,P_r";
constexpr const char* coherence_header = ",abs_rho_gi,abs_rho_ir,abs_rho_gr";
constexpr const char* sweep_header =
    "swept_value,P_g_final,P_i_final,P_r_final,P_i_peak,lz_probability";

std::string json_number(double x) { return std::isfinite(x) ? format_number(x) : "null"; }

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
    return os;
}

void finish(std::ofstream& os, const std::filesystem::path& path) {
    os.flush();
    if (!os) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

std::string json_string(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string_view to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "jsonl"; }

OutputFormat parse_output_format(std::string_view text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "jsonl" || text == "json-lines") return OutputFormat::JsonLines;
    throw ConfigError(fmt::format("unknown output format '{}' (expected csv|jsonl)", text));
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    // Avoid "-0" so that sign-of-zero noise cannot change the bytes.
    if (x == 0.0) x = 0.0;
    return fmt::format("{:.12g}", x);
}

void write_trajectory(std::ostream& os, const Trajectory& tr, OutputFormat format) {
    const bool coh = !tr.coherences.empty();
    if (format == OutputFormat::Csv) {
        os << trajectory_header << (coh ? coherence_header : "") << '\n';
        for (std::size_t k = 0; k < tr.size(); ++k) {
            os << format_number(tr.t[k]) << ',' << format_number(tr.p_g[k]) << ','
               << format_number(tr.p_i[k]) << ',' << format_number(tr.p_r[k]);
            if (coh)
                for (double c : tr.coherences[k]) os << ',' << format_number(c);
            os << '\n';
        }
        return;
    }
    for (std::size_t k = 0; k < tr.size(); ++k) {
        os << "{\"t_us\":" << json_number(tr.t[k]) << ",\"P_g\":" << json_number(tr.p_g[k])
           << ",\"P_i\":" << json_number(tr.p_i[k]) << ",\"P_r\":" << json_number(tr.p_r[k]);
        if (coh)
            os << ",\"abs_rho_gi\":" << json_number(tr.coherences[k][0])
               << ",\"abs_rho_ir\":" << json_number(tr.coherences[k][1])
               << ",\"abs_rho_gr\":" << json_number(tr.coherences[k][2]);
        os << "}\n";
    }
}

void write_sweep(std::ostream& os, const SweepResult& res, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        os << sweep_header << '\n';
        for (const SweepRow& r : res.rows) {
            const double nan = std::nan("");
            os << format_number(r.value) << ',' << format_number(r.ok ? r.p_g : nan) << ','
               << format_number(r.ok ? r.p_i : nan) << ',' << format_number(r.ok ? r.p_r : nan)
               << ',' << format_number(r.ok ? r.p_i_peak : nan) << ','
               << format_number(r.lz_probability) << '\n';
        }
        return;
    }
    os << "{\"meta\":{";
    for (std::size_t k = 0; k < res.metadata.size(); ++k) {
        const std::string& line = res.metadata[k];
        const auto eq = line.find('=');
        os << (k ? "," : "") << json_string(line.substr(0, eq)) << ':'
           << json_string(eq == std::string::npos ? "" : line.substr(eq + 1));
    }
    os << "}}\n";
    for (const SweepRow& r : res.rows) {
        os << "{\"swept_value\":" << json_number(r.value);
        if (r.ok)
            os << ",\"P_g_final\":" << json_number(r.p_g) << ",\"P_i_final\":" << json_number(r.p_i)
               << ",\"P_r_final\":" << json_number(r.p_r) << ",\"P_i_peak\":"
               << json_number(r.p_i_peak);
        os << ",\"lz_probability\":" << json_number(r.lz_probability)
           << ",\"omega_eff_peak_mhz\":" << json_number(r.omega_eff_peak)
           << ",\"alpha_tau2\":" << json_number(r.alpha_tau2)
           << ",\"ok\":" << (r.ok ? "true" : "false");
        if (!r.ok) os << ",\"error\":" << json_string(r.error);
        os << "}\n";
    }
}

void write_dressed(std::ostream& os, const std::vector<DressedSnapshot>& rows, OutputFormat format) {
    static constexpr const char* names[] = {
        "t_us",          "omega_eff_mhz",    "stark_g_mhz", "stark_r_mhz",
        "delta_eff_mhz", "lambda_plus_mhz",  "lambda_minus_mhz", "theta_rad",
        "c_g_plus",      "c_r_plus",         "c_g_minus",   "c_r_minus"};
    auto values = [](const DressedSnapshot& s) {
        return std::array<double, 12>{s.t,           s.omega_eff,    s.stark_g,
                                      s.stark_r,     s.delta_eff,    s.lambda_plus,
                                      s.lambda_minus, s.theta,       s.coeffs.g_plus,
                                      s.coeffs.r_plus, s.coeffs.g_minus, s.coeffs.r_minus};
    };
    if (format == OutputFormat::Csv) {
        for (std::size_t k = 0; k < 12; ++k) os << (k ? "," : "") << names[k];
        os << '\n';
        for (const DressedSnapshot& s : rows) {
            const auto v = values(s);
            for (std::size_t k = 0; k < 12; ++k) os << (k ? "," : "") << format_number(v[k]);
            os << '\n';
        }
        return;
    }
    for (const DressedSnapshot& s : rows) {
        const auto v = values(s);
        os << '{';
        for (std::size_t k = 0; k < 12; ++k)
            os << (k ? "," : "") << '"' << names[k] << "\":" << json_number(v[k]);
        os << "}\n";
    }
}

void write_check_report(std::ostream& os, const AdiabaticityReport& r) {
    os << "adiabaticity report\n";
    os << "  verdict                      " << r.verdict() << '\n';
    if (r.no_sweep) os << "  note                         no sweep; ARP inapplicable\n";
    os << "  alpha*tau_p^2                " << format_number(r.alpha_tau2_pump) << '\n';
    if (r.beta_tau2_stokes)
        os << "  beta*tau_S^2                 " << format_number(*r.beta_tau2_stokes) << '\n';
    else
        os << "  beta*tau_S^2                 n/a (CW Stokes)\n";
    os << "  alpha_eff [MHz/us]           " << format_number(r.alpha_eff) << '\n';
    os << "  peak Omega_eff [MHz]         " << format_number(r.omega_eff_peak) << " at t = "
       << format_number(r.t_peak) << " us\n";
    os << "  |alpha_eff|/Omega_eff^2      " << format_number(r.sweep_ratio_plain)
       << " (plain), " << format_number(r.sweep_ratio_angular) << " (angular)\n";
    os << "  max |dDelta_eff/dt|/Omega^2  " << format_number(r.max_local_ratio) << " at t = "
       << format_number(r.t_max_local_ratio) << " us\n";
    os << "  Landau-Zener P_diabatic      " << format_number(r.lz_probability) << '\n';
    if (!r.no_sweep && !r.passes()) {
        const bool tau_bad = std::abs(r.alpha_tau2_pump) < AdiabaticityReport::min_alpha_tau2 ||
                             (r.beta_tau2_stokes && *r.beta_tau2_stokes != 0.0 &&
                              std::abs(*r.beta_tau2_stokes) < AdiabaticityReport::min_alpha_tau2);
        if (tau_bad) os << "  warn: alpha*tau^2 < " << AdiabaticityReport::min_alpha_tau2 << '\n';
        if (r.lz_probability > AdiabaticityReport::max_lz_probability)
            os << "  warn: Landau-Zener probability > " << AdiabaticityReport::max_lz_probability
               << '\n';
    }
}

void write_check_report_json(std::ostream& os, const AdiabaticityReport& r) {
    os << "{\"verdict\":" << json_string(r.verdict())
       << ",\"no_sweep\":" << (r.no_sweep ? "true" : "false")
       << ",\"alpha_tau2_pump\":" << json_number(r.alpha_tau2_pump) << ",\"beta_tau2_stokes\":"
       << (r.beta_tau2_stokes ? json_number(*r.beta_tau2_stokes) : "null")
       << ",\"alpha_eff_mhz_per_us\":" << json_number(r.alpha_eff)
       << ",\"omega_eff_peak_mhz\":" << json_number(r.omega_eff_peak)
       << ",\"t_peak_us\":" << json_number(r.t_peak)
       << ",\"sweep_ratio_plain\":" << json_number(r.sweep_ratio_plain)
       << ",\"sweep_ratio_angular\":" << json_number(r.sweep_ratio_angular)
       << ",\"max_local_ratio\":" << json_number(r.max_local_ratio)
       << ",\"t_max_local_ratio_us\":" << json_number(r.t_max_local_ratio)
       << ",\"lz_probability\":" << json_number(r.lz_probability) << "}\n";
}

namespace {

void plot_preamble(std::ostream& os, std::string_view xlabel) {
    os << "# gnuplot script; run with: gnuplot -p <this file>\n";
    os << "set xlabel '" << xlabel << "'\n";
    os << "set ylabel 'population'\n";
    os << "set yrange [-0.02:1.02]\n";
    os << "set key outside right\n";
    os << "set grid\n";
}

void plot_curves(std::ostream& os, int col_g, int col_i, int col_r) {
    os << "plot $data using 1:" << col_g << " with lines lw 2 lc rgb 'black' title '|g>', \\\n"
       << "     $data using 1:" << col_i << " with lines lw 2 lc rgb 'red' title '|i>', \\\n"
       << "     $data using 1:" << col_r << " with lines lw 2 lc rgb 'blue' title '|r>'\n";
}

}  // namespace

void write_plot_script(std::ostream& os, const SweepResult& res) {
    plot_preamble(os, fmt::format("{} ({})", to_string(res.parameter), to_string(res.model)));
    for (const std::string& m : res.metadata) os << "# " << m << '\n';
    os << "$data << EOD\n";
    for (const SweepRow& r : res.rows)
        if (r.ok)
            os << format_number(r.value) << ' ' << format_number(r.p_g) << ' '
               << format_number(r.p_i) << ' ' << format_number(r.p_r) << '\n';
    os << "EOD\n";
    plot_curves(os, 2, 3, 4);
}

void write_plot_script(std::ostream& os, const Trajectory& tr) {
    plot_preamble(os, "t (us)");
    os << "# model=" << to_string(tr.model) << " case=" << to_string(tr.scheme.case_tag) << '\n';
    os << "$data << EOD\n";
    for (std::size_t k = 0; k < tr.size(); ++k)
        os << format_number(tr.t[k]) << ' ' << format_number(tr.p_g[k]) << ' '
           << format_number(tr.p_i[k]) << ' ' << format_number(tr.p_r[k]) << '\n';
    os << "EOD\n";
    plot_curves(os, 2, 3, 4);
}

void emit_trajectory(const Trajectory& traj, OutputFormat format, const std::filesystem::path& path) {
    auto os = open_output(path);
    write_trajectory(os, traj, format);
    finish(os, path);
}

void emit_sweep(const SweepResult& result, OutputFormat format, const std::filesystem::path& path) {
    auto os = open_output(path);
    write_sweep(os, result, format);
    finish(os, path);
}

void emit_plot_script(const SweepResult& result, const std::filesystem::path& path) {
    auto os = open_output(path);
    write_plot_script(os, result);
    finish(os, path);
}

void emit_plot_script(const Trajectory& traj, const std::filesystem::path& path) {
    auto os = open_output(path);
    write_plot_script(os, traj);
    finish(os, path);
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError(fmt::format("cannot open '{}'", path.string()));
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty trajectory file");
    bool coh = false;
    if (line == std::string(trajectory_header) + coherence_header)
        coh = true;
    else if (line != trajectory_header)
        throw IoError(fmt::format("unexpected trajectory header '{}'", line));

    Trajectory tr;
    const std::size_t ncol = coh ? 7 : 4;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                v.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw IoError(fmt::format("line {}: bad number '{}'", lineno, cell));
            }
        }
        if (v.size() != ncol)
            throw IoError(fmt::format("line {}: expected {} columns, got {}", lineno, ncol, v.size()));
        tr.t.push_back(v[0]);
        tr.p_g.push_back(v[1]);
        tr.p_i.push_back(v[2]);
        tr.p_r.push_back(v[3]);
        if (coh) tr.coherences.push_back({v[4], v[5], v[6]});
    }
    return tr;
}

}  // namespace arpsim
