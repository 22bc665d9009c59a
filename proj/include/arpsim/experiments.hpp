#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arpsim/dynamics.hpp"
#include "arpsim/model.hpp"

namespace arpsim {

// Presets for the three excitation schemes. Case 1 takes the common peak
// Rabi frequency of both pulses (MHz).
SchemeSpec preset_case1(double peak_rabi = 100.0);
SchemeSpec preset_case2();
SchemeSpec preset_case3();

// Looks up "case1" | "case2" | "case3"; throws DomainError otherwise.
SchemeSpec preset_by_name(std::string_view name);

enum class SweptParameter { EqualPeakRabi, PumpToStokesRatio, ChirpRate, PulseWidth };

std::string_view to_string(SweptParameter p);
SweptParameter parse_swept_parameter(std::string_view text);

struct SweepSpec {
    SchemeSpec base;
    SweptParameter parameter = SweptParameter::EqualPeakRabi;
    double lo = 0.0;
    double hi = 120.0;
    int points = 61;
    // Stokes peak Rabi frequency held fixed during ratio sweeps (MHz).
    std::optional<double> stokes_reference;
    Model model = Model::Lindblad;
    PropagateOptions options{};
    int jobs = 1;
};

struct SweepRow {
    double value = 0.0;
    double p_g = 0.0;
    double p_i = 0.0;
    double p_r = 0.0;
    double p_i_peak = 0.0;
    double lz_probability = 1.0;
    double omega_eff_peak = 0.0;  // MHz
    double alpha_tau2 = 0.0;      // pump
    bool ok = true;
    std::string error;  // set when the propagation failed
};

struct SweepResult {
    SweptParameter parameter = SweptParameter::EqualPeakRabi;
    Model model = Model::Lindblad;
    std::vector<std::string> metadata;  // "key=value" provenance lines
    std::vector<SweepRow> rows;

    bool all_ok() const;
};

void validate(const SweepSpec& spec);
std::vector<double> sweep_grid(const SweepSpec& spec);
// The scheme evaluated at one grid value.
SchemeSpec instantiate(const SweepSpec& spec, double value);

// Evaluates every grid point (on up to spec.jobs threads). Rows come back in
// grid order regardless of scheduling; failures are flagged in-row.
SweepResult run_sweep(const SweepSpec& spec);

struct FinalPopulations {
    double p_g;
    double p_i;
    double p_r;
    double p_i_peak;  // max over the trajectory
};

FinalPopulations final_populations(const Trajectory& traj);

}  // namespace arpsim
