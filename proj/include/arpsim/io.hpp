#pragma once

// Serialization of trajectories, sweep tables, dressed-state tables,
// adiabaticity reports and gnuplot scripts. All numbers are written with 12
// significant digits and LF line endings so equal inputs give equal bytes.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "arpsim/dynamics.hpp"
#include "arpsim/effective.hpp"
#include "arpsim/experiments.hpp"

namespace arpsim {

enum class OutputFormat { Csv, JsonLines };

std::string_view to_string(OutputFormat f);
OutputFormat parse_output_format(std::string_view text);

// "{:.12g}" with nan/inf spelled the way both CSV readers and JSON
// consumers can tolerate ("nan", "inf" in CSV; null in JSON lines).
std::string format_number(double x);

void write_trajectory(std::ostream& os, const Trajectory& traj, OutputFormat format);
void write_sweep(std::ostream& os, const SweepResult& result, OutputFormat format);
void write_dressed(std::ostream& os, const std::vector<DressedSnapshot>& rows, OutputFormat format);
void write_check_report(std::ostream& os, const AdiabaticityReport& report);       // text
void write_check_report_json(std::ostream& os, const AdiabaticityReport& report);  // one JSON object

// Self-contained gnuplot scripts (data embedded as a datablock): populations
// against the swept value, or against time for a trajectory.
void write_plot_script(std::ostream& os, const SweepResult& result);
void write_plot_script(std::ostream& os, const Trajectory& traj);

// File variants; throw IoError when the path cannot be written.
void emit_trajectory(const Trajectory& traj, OutputFormat format, const std::filesystem::path& path);
void emit_sweep(const SweepResult& result, OutputFormat format, const std::filesystem::path& path);
void emit_plot_script(const SweepResult& result, const std::filesystem::path& path);
void emit_plot_script(const Trajectory& traj, const std::filesystem::path& path);

// Reads back a trajectory CSV written by write_trajectory (populations and
// optional coherence columns only). Throws IoError on malformed input.
Trajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace arpsim
