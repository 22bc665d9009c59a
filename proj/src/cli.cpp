#include "arpsim/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "arpsim/effective.hpp"
#include "arpsim/errors.hpp"

namespace arpsim::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double to_double(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
        throw ConfigError(fmt::format("{}: expected a finite number, got '{}'", key, text));
    return v;
}

int to_int(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
        throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, text));
    return v;
}

bool to_bool(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError(fmt::format("{}: expected true|false, got '{}'", key, text));
}

template <class F>
auto rethrow_as_config(std::string_view key, F&& f) {
    try {
        return f();
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("{}: {}", key, e.what()));
    }
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

struct Entry {
    KeyInfo info;
    Setter set;
};

void add_field_keys(std::vector<Entry>& out, const std::string& prefix,
                    FieldSpec SchemeSpec::*member) {
    auto num = [member](double FieldSpec::*f) {
        return [member, f](RunConfig& c, std::string_view k, std::string_view v) {
            (c.scheme.*member).*f = to_double(k, v);
        };
    };
    out.push_back({{prefix + ".shape", "", "envelope: gaussian | cw"},
                   [member](RunConfig& c, std::string_view k, std::string_view v) {
                       (c.scheme.*member).shape =
                           rethrow_as_config(k, [&] { return parse_shape(trim(v)); });
                   }});
    out.push_back({{prefix + ".peak_rabi", "mhz", "peak Rabi frequency"}, num(&FieldSpec::peak_rabi)});
    out.push_back({{prefix + ".center_time", "us", "pulse center"}, num(&FieldSpec::center_time)});
    out.push_back({{prefix + ".width", "us", "Gaussian width (sigma of the field envelope)"},
                   num(&FieldSpec::width)});
    out.push_back({{prefix + ".chirp_rate", "mhz_per_us", "linear chirp rate"},
                   num(&FieldSpec::chirp_rate)});
    out.push_back({{prefix + ".chirp_center", "us", "time at which the chirp offset vanishes"},
                   num(&FieldSpec::chirp_center)});
}

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = [] {
        std::vector<Entry> e;
        e.push_back({{"case", "", "both_chirped | pump_only_chirped | pump_chirped_stokes_cw"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.scheme.case_tag =
                             rethrow_as_config(k, [&] { return parse_case_tag(trim(v)); });
                     }});
        add_field_keys(e, "pump", &SchemeSpec::pump);
        add_field_keys(e, "stokes", &SchemeSpec::stokes);
        auto atom = [](double AtomSpec::*f) {
            return [f](RunConfig& c, std::string_view k, std::string_view v) {
                c.scheme.atom.*f = to_double(k, v);
            };
        };
        e.push_back({{"atom.delta0", "mhz", "static one-photon detuning"}, atom(&AtomSpec::delta0)});
        e.push_back({{"atom.small_delta0", "mhz", "two-photon detuning at the chirp center"},
                     atom(&AtomSpec::small_delta0)});
        e.push_back({{"atom.gamma_ig", "mhz", "population decay rate of |i> (to |g>)"},
                     atom(&AtomSpec::gamma_ig)});
        e.push_back({{"atom.gamma_ri", "mhz", "population decay rate of |r> (to |i>)"},
                     atom(&AtomSpec::gamma_ri)});
        e.push_back({{"window.t_start", "us", "integration start"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.scheme.t_start = to_double(k, v);
                     }});
        e.push_back({{"window.t_end", "us", "integration end"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.scheme.t_end = to_double(k, v);
                     }});
        auto unit_flag = [](bool UnitConvention::*f) {
            return [f](RunConfig& c, std::string_view k, std::string_view v) {
                c.scheme.units.*f = to_bool(k, v);
            };
        };
        e.push_back({{"units.rabi_2pi", "", "multiply Rabi frequencies by 2 pi"},
                     unit_flag(&UnitConvention::rabi_angular)});
        e.push_back({{"units.detuning_2pi", "", "multiply static detunings by 2 pi"},
                     unit_flag(&UnitConvention::detuning_angular)});
        e.push_back({{"units.chirp_2pi", "", "multiply chirp rates by 2 pi"},
                     unit_flag(&UnitConvention::chirp_angular)});
        e.push_back({{"units.decay_2pi", "", "multiply decay rates by 2 pi"},
                     unit_flag(&UnitConvention::decay_angular)});
        e.push_back({{"run.model", "", "lindblad | schrodinger | effective"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.model = rethrow_as_config(k, [&] { return parse_model(trim(v)); });
                     }});
        e.push_back({{"run.format", "", "csv | jsonl"},
                     [](RunConfig& c, std::string_view, std::string_view v) {
                         c.format = parse_output_format(trim(v));
                     }});
        e.push_back({{"run.out", "", "output path (stdout when unset)"},
                     [](RunConfig& c, std::string_view, std::string_view v) { c.out = trim(v); }});
        e.push_back({{"run.plot", "", "gnuplot script path"},
                     [](RunConfig& c, std::string_view, std::string_view v) { c.plot = trim(v); }});
        e.push_back({{"run.samples", "", "number of uniform output samples"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.samples = to_int(k, v);
                     }});
        e.push_back({{"run.jobs", "", "worker threads for sweeps"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.jobs = to_int(k, v);
                     }});
        e.push_back({{"run.rel_tol", "", "integrator relative tolerance"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.rel_tol = to_double(k, v);
                     }});
        e.push_back({{"run.abs_tol", "", "integrator absolute tolerance"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.abs_tol = to_double(k, v);
                     }});
        e.push_back({{"run.coherences", "", "also write |rho_gi|, |rho_ir|, |rho_gr|"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.coherences = to_bool(k, v);
                     }});
        e.push_back({{"sweep.parameter", "",
                      "equal_peak_rabi | pump_to_stokes_ratio | chirp_rate | pulse_width"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.sweep.parameter =
                             rethrow_as_config(k, [&] { return parse_swept_parameter(trim(v)); });
                     }});
        e.push_back({{"sweep.lo", "", "first grid value (units of the swept parameter)"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.sweep.lo = to_double(k, v);
                     }});
        e.push_back({{"sweep.hi", "", "last grid value"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.sweep.hi = to_double(k, v);
                     }});
        e.push_back({{"sweep.points", "", "grid size (>= 2)"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.sweep.points = to_int(k, v);
                     }});
        e.push_back({{"sweep.stokes_reference", "mhz", "fixed Stokes Rabi frequency in ratio sweeps"},
                     [](RunConfig& c, std::string_view k, std::string_view v) {
                         c.sweep.stokes_reference = to_double(k, v);
                     }});
        return e;
    }();
    return entries;
}

const Entry* find_entry(std::string_view key) {
    const auto& reg = registry();
    const auto it = std::find_if(reg.begin(), reg.end(),
                                 [&](const Entry& e) { return e.info.key == key; });
    return it == reg.end() ? nullptr : &*it;
}

std::string unit_label(std::string_view suffix) {
    if (suffix == "mhz") return "MHz";
    if (suffix == "us") return "us";
    if (suffix == "mhz_per_us") return "MHz/us";
    return "dimensionless";
}

Command parse_command(std::string_view s) {
    if (s == "simulate") return Command::Simulate;
    if (s == "sweep") return Command::Sweep;
    if (s == "dressed") return Command::Dressed;
    if (s == "check") return Command::Check;
    throw ConfigError(fmt::format("unknown command '{}'", s));
}

void validate_run(const RunConfig& c) {
    if (c.samples < 2) throw ConfigError("run.samples: must be >= 2");
    if (c.jobs < 1) throw ConfigError("run.jobs: must be >= 1");
    if (!(c.rel_tol > 0.0 && c.rel_tol <= 1e-3)) throw ConfigError("run.rel_tol: must lie in (0, 1e-3]");
    if (!(c.abs_tol > 0.0 && c.abs_tol <= 1e-3)) throw ConfigError("run.abs_tol: must lie in (0, 1e-3]");
    try {
        validate(c.scheme);
        if (c.command == Command::Sweep) validate(c.sweep_spec());
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("invalid configuration: {}", e.what()));
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Writes through `write` to the configured output path, or to `out`.
template <class Write>
void with_output(const RunConfig& cfg, std::ostream& out, Write&& write) {
    if (!cfg.out) {
        write(out);
        return;
    }
    std::ofstream os(*cfg.out, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError(fmt::format("cannot open '{}' for writing", cfg.out->string()));
    write(os);
    os.flush();
    if (!os) throw IoError(fmt::format("write to '{}' failed", cfg.out->string()));
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    for (const std::string& w : scheme_warnings(cfg.scheme)) err << "warning: " << w << '\n';

    switch (cfg.command) {
    case Command::Simulate: {
        const Trajectory tr = propagate(cfg.model, cfg.scheme, cfg.propagate_options());
        with_output(cfg, out, [&](std::ostream& os) { write_trajectory(os, tr, cfg.format); });
        if (cfg.plot) emit_plot_script(tr, *cfg.plot);
        const FinalPopulations f = final_populations(tr);
        err << fmt::format("final P_g={} P_i={} P_r={} peak P_i={} steps={} rejected={}\n",
                           format_number(f.p_g), format_number(f.p_i), format_number(f.p_r),
                           format_number(f.p_i_peak), tr.stats.accepted, tr.stats.rejected);
        return exit_ok;
    }
    case Command::Sweep: {
        const SweepResult res = run_sweep(cfg.sweep_spec());
        with_output(cfg, out, [&](std::ostream& os) { write_sweep(os, res, cfg.format); });
        if (cfg.out && cfg.format == OutputFormat::Csv) {
            std::filesystem::path meta = *cfg.out;
            meta += ".meta";
            std::ofstream ms(meta, std::ios::binary | std::ios::trunc);
            if (!ms) throw IoError(fmt::format("cannot open '{}' for writing", meta.string()));
            for (const std::string& m : res.metadata) ms << m << '\n';
        }
        if (cfg.plot) emit_plot_script(res, *cfg.plot);
        int failed = 0;
        for (const SweepRow& r : res.rows)
            if (!r.ok) {
                ++failed;
                err << "error: sweep point " << format_number(r.value) << ": " << r.error << '\n';
            }
        return failed ? exit_numerical : exit_ok;
    }
    case Command::Dressed: {
        std::vector<DressedSnapshot> rows;
        rows.reserve(cfg.samples);
        const double dt = (cfg.scheme.t_end - cfg.scheme.t_start) / (cfg.samples - 1);
        for (int k = 0; k < cfg.samples; ++k) {
            const double t = k + 1 == cfg.samples ? cfg.scheme.t_end : cfg.scheme.t_start + k * dt;
            rows.push_back(snapshot(cfg.scheme, t));
        }
        with_output(cfg, out, [&](std::ostream& os) { write_dressed(os, rows, cfg.format); });
        return exit_ok;
    }
    case Command::Check: {
        const AdiabaticityReport rep = adiabaticity_report(cfg.scheme);
        if (cfg.format == OutputFormat::JsonLines && !cfg.out) {
            write_check_report_json(out, rep);
        } else {
            write_check_report(out, rep);
            if (cfg.out)
                with_output(cfg, out, [&](std::ostream& os) { write_check_report_json(os, rep); });
        }
        return exit_ok;
    }
    }
    return exit_ok;
}

}  // namespace

std::string_view to_string(Command c) {
    switch (c) {
    case Command::Simulate: return "simulate";
    case Command::Sweep: return "sweep";
    case Command::Dressed: return "dressed";
    case Command::Check: return "check";
    }
    return "?";
}

PropagateOptions RunConfig::propagate_options() const {
    PropagateOptions o;
    o.rel_tol = rel_tol;
    o.abs_tol = abs_tol;
    o.n_samples = samples;
    o.record_coherences = coherences;
    return o;
}

SweepSpec RunConfig::sweep_spec() const {
    SweepSpec s;
    s.base = scheme;
    s.parameter = sweep.parameter;
    s.lo = sweep.lo;
    s.hi = sweep.hi;
    s.points = sweep.points;
    if (sweep.parameter == SweptParameter::PumpToStokesRatio) s.stokes_reference = sweep.stokes_reference;
    s.model = model;
    s.options = propagate_options();
    s.jobs = jobs;
    return s;
}

const std::vector<KeyInfo>& schema() {
    static const std::vector<KeyInfo> keys = [] {
        std::vector<KeyInfo> k;
        for (const Entry& e : registry()) k.push_back(e.info);
        return k;
    }();
    return keys;
}

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, bool require_unit) {
    const std::string k = trim(key);
    if (const Entry* e = find_entry(k)) {
        if (require_unit && !e->info.unit.empty())
            throw ConfigError(fmt::format("{}: missing unit suffix, write {}_{} ({})", k, k,
                                          e->info.unit, unit_label(e->info.unit)));
        e->set(cfg, k, value);
        return;
    }
    // Longest suffix first: "_mhz_per_us" also ends in "_us".
    for (std::string_view suffix : {"mhz_per_us", "mhz", "us"}) {
        const std::string tail = "_" + std::string(suffix);
        if (k.size() <= tail.size() || k.compare(k.size() - tail.size(), tail.size(), tail) != 0)
            continue;
        const std::string base = k.substr(0, k.size() - tail.size());
        const Entry* e = find_entry(base);
        if (!e) continue;
        if (e->info.unit != suffix)
            throw ConfigError(fmt::format("{}: unit-suffix mismatch, {} is in {} not {}", k, base,
                                          unit_label(e->info.unit), unit_label(suffix)));
        e->set(cfg, k, value);
        return;
    }
    throw ConfigError(fmt::format("unknown key '{}'", k));
}

void apply_config_text(RunConfig& cfg, std::string_view text, std::string_view origin) {
    std::istringstream is{std::string(text)};
    std::string line;
    int lineno = 0;
    bool seen_setting = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(fmt::format("{}:{}: expected key = value", origin, lineno));
        const std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        try {
            if (key == "preset") {
                if (seen_setting)
                    throw ConfigError("preset must precede all other settings");
                cfg.scheme = rethrow_as_config(key, [&] { return preset_by_name(value); });
                continue;
            }
            apply_setting(cfg, key, value, true);
            seen_setting = true;
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("{}:{}: {}", origin, lineno, e.what()));
        }
    }
}

RunConfig parse_command_line(const std::vector<std::string>& args) {
    CLI::App app{"arpsim: two-photon adiabatic rapid passage to a Rydberg state", "arpsim"};
    std::string command, preset, model, format, out, plot;
    std::filesystem::path config;
    std::vector<std::string> sets;
    int samples = 0, jobs = 0;
    double rel_tol = 0.0, abs_tol = 0.0;
    bool coherences = false;

    app.add_option("command", command, "simulate | sweep | dressed | check")->required();
    auto* o_preset = app.add_option("--preset", preset, "case1 | case2 | case3");
    auto* o_config = app.add_option("--config", config, "config file (key = value)");
    o_preset->excludes(o_config);
    app.add_option("--set", sets, "override, e.g. pump.peak_rabi=100 (repeatable)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    auto* o_model = app.add_option("--model", model, "lindblad | schrodinger | effective");
    auto* o_out = app.add_option("--out", out, "output file (default stdout)");
    auto* o_format = app.add_option("--format", format, "csv | jsonl");
    auto* o_samples = app.add_option("--samples", samples, "number of output samples");
    auto* o_jobs = app.add_option("--jobs", jobs, "sweep worker threads");
    auto* o_plot = app.add_option("--plot", plot, "write a gnuplot script here");
    auto* o_rel = app.add_option("--rel-tol", rel_tol, "integrator relative tolerance");
    auto* o_abs = app.add_option("--abs-tol", abs_tol, "integrator absolute tolerance");
    auto* o_coh = app.add_flag("--coherences", coherences, "write coherence magnitudes");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    RunConfig cfg;
    cfg.command = parse_command(command);
    if (o_preset->count()) {
        cfg.scheme = rethrow_as_config("--preset", [&] { return preset_by_name(preset); });
        cfg.source = "preset:" + preset;
    } else if (o_config->count()) {
        cfg.scheme = preset_case1();
        apply_config_text(cfg, read_file(config), config.string());
        cfg.source = "config:" + config.string();
    } else {
        throw ConfigError("no scheme source: give --preset NAME or --config FILE");
    }

    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(fmt::format("--set expects key=value, got '{}'", s));
        apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1), false);
    }

    if (o_model->count())
        cfg.model = rethrow_as_config("--model", [&] { return parse_model(model); });
    if (o_format->count()) cfg.format = parse_output_format(format);
    if (o_out->count()) cfg.out = out;
    if (o_plot->count()) cfg.plot = plot;
    if (o_samples->count()) cfg.samples = samples;
    if (o_jobs->count()) cfg.jobs = jobs;
    if (o_rel->count()) cfg.rel_tol = rel_tol;
    if (o_abs->count()) cfg.abs_tol = abs_tol;
    if (o_coh->count()) cfg.coherences = coherences;

    validate_run(cfg);
    return cfg;
}

namespace {

std::string usage() {
    std::string u =
        "usage: arpsim simulate|sweep|dressed|check [--preset NAME | --config FILE]\n"
        "              [--set key=value]... [--model lindblad|schrodinger|effective]\n"
        "              [--out PATH] [--format csv|jsonl] [--samples N] [--jobs N]\n"
        "              [--plot PATH] [--rel-tol X] [--abs-tol X] [--coherences]\n\n"
        "configuration keys (config files need the unit suffix):\n";
    for (const KeyInfo& k : schema())
        u += fmt::format("  {:<32} {}\n",
                         k.unit.empty() ? k.key : fmt::format("{}_{}", k.key, k.unit),
                         k.description);
    return u;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.empty() || std::find_if(args.begin(), args.end(), [](const std::string& a) {
                            return a == "-h" || a == "--help";
                        }) != args.end()) {
        out << usage();
        return args.empty() ? exit_config : exit_ok;
    }
    RunConfig cfg;
    try {
        cfg = parse_command_line(args);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    }
    try {
        return run_command(cfg, out, err);
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << '\n';
        return exit_io;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    } catch (const DomainError& e) {
        err << "numerical error: " << e.what() << '\n';
        return exit_numerical;
    }
}

}  // namespace arpsim::cli
