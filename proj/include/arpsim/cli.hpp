#pragma once

// Command-line front end: configuration resolution and command dispatch for
// `arpsim simulate|sweep|dressed|check`.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arpsim/dynamics.hpp"
#include "arpsim/experiments.hpp"
#include "arpsim/io.hpp"

namespace arpsim::cli {

enum class Command { Simulate, Sweep, Dressed, Check };

std::string_view to_string(Command c);

// Process exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_io = 4;

struct SweepSettings {
    SweptParameter parameter = SweptParameter::EqualPeakRabi;
    double lo = 0.0;
    double hi = 120.0;
    int points = 61;
    double stokes_reference = 70.0;  // MHz, used by ratio sweeps
};

struct RunConfig {
    Command command = Command::Simulate;
    std::string source;  // "preset:<name>" or "config:<path>"
    SchemeSpec scheme;
    Model model = Model::Lindblad;
    OutputFormat format = OutputFormat::Csv;
    std::optional<std::filesystem::path> out;
    std::optional<std::filesystem::path> plot;
    int samples = 2000;
    int jobs = 1;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    bool coherences = false;
    SweepSettings sweep;

    PropagateOptions propagate_options() const;
    SweepSpec sweep_spec() const;
};

// One schema entry: canonical key, unit suffix ("" for dimensionless) and a
// short description. Config files must spell dimensioned keys with their
// suffix (e.g. pump.peak_rabi_mhz); --set accepts either spelling.
struct KeyInfo {
    std::string key;
    std::string unit;
    std::string description;
};

const std::vector<KeyInfo>& schema();

// Applies one key=value assignment. `require_unit` enforces the suffix.
// Throws ConfigError on unknown keys, unit mismatches or bad values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value, bool require_unit);

// Applies a config file's contents (key = value lines, '#' comments).
// A `preset = caseN` line, if present, must come first and resets the scheme.
void apply_config_text(RunConfig& cfg, std::string_view text, std::string_view origin = "<config>");

// Parses argv (without the program name) into a validated configuration.
// Precedence: preset/config file < --set overrides < dedicated flags.
// Throws ConfigError.
RunConfig parse_command_line(const std::vector<std::string>& args);

// Runs a full command; returns the process exit code. Help output goes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace arpsim::cli
