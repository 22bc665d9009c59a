#include "arpsim/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <fmt/format.h>

#include "arpsim/effective.hpp"
#include "arpsim/errors.hpp"

namespace arpsim {

namespace {

// Rb 5P3/2 and 97d5/2 population decay rates.
constexpr AtomSpec rb87_ladder{1500.0, 0.0, 6.0, 3.0e-3};

FieldSpec gaussian(double peak, double width, double chirp, double chirp_center) {
    return {EnvelopeShape::Gaussian, peak, 0.0, width, chirp, chirp_center};
}

}  // namespace

SchemeSpec preset_case1(double peak_rabi) {
    SchemeSpec s;
    s.pump = gaussian(peak_rabi, 1.0, 4.2, 0.0);
    s.stokes = gaussian(peak_rabi, 1.0, 4.2, 0.0);
    s.atom = rb87_ladder;
    s.t_start = -5.0;
    s.t_end = 5.0;
    s.case_tag = CaseTag::BothChirped;
    return s;
}

SchemeSpec preset_case2() {
    SchemeSpec s;
    s.pump = gaussian(25.0, 0.45, 2.0, 0.0);
    s.stokes = gaussian(25.0, 0.45, 0.0, 0.0);
    s.atom = rb87_ladder;
    s.t_start = -5.0;
    s.t_end = 5.0;
    s.case_tag = CaseTag::PumpOnlyChirped;
    return s;
}

SchemeSpec preset_case3() {
    SchemeSpec s;
    s.pump = gaussian(35.0, 0.34, 2.0, -0.26);
    s.stokes = {EnvelopeShape::ConstantCW, 17.0, 0.0, 1.0, 0.0, -0.26};
    s.atom = rb87_ladder;
    s.t_start = -5.0;
    s.t_end = 5.0;
    s.case_tag = CaseTag::PumpChirpedStokesCW;
    return s;
}

SchemeSpec preset_by_name(std::string_view name) {
    if (name == "case1") return preset_case1();
    if (name == "case2") return preset_case2();
    if (name == "case3") return preset_case3();
    throw DomainError(fmt::format("unknown preset '{}' (expected case1|case2|case3)", name));
}

std::string_view to_string(SweptParameter p) {
    switch (p) {
    case SweptParameter::EqualPeakRabi: return "equal_peak_rabi";
    case SweptParameter::PumpToStokesRatio: return "pump_to_stokes_ratio";
    case SweptParameter::ChirpRate: return "chirp_rate";
    case SweptParameter::PulseWidth: return "pulse_width";
    }
    return "?";
}

SweptParameter parse_swept_parameter(std::string_view text) {
    if (text == "equal_peak_rabi") return SweptParameter::EqualPeakRabi;
    if (text == "pump_to_stokes_ratio") return SweptParameter::PumpToStokesRatio;
    if (text == "chirp_rate") return SweptParameter::ChirpRate;
    if (text == "pulse_width") return SweptParameter::PulseWidth;
    throw DomainError(fmt::format(
        "unknown sweep parameter '{}' (expected equal_peak_rabi|pump_to_stokes_ratio|chirp_rate|"
        "pulse_width)",
        text));
}

bool SweepResult::all_ok() const {
    return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok; });
}

void validate(const SweepSpec& spec) {
    if (!(spec.lo < spec.hi))
        throw DomainError(fmt::format("sweep: need lo < hi, got [{}, {}]", spec.lo, spec.hi));
    if (spec.points < 2) throw DomainError("sweep: need at least 2 points");
    if (spec.jobs < 1) throw DomainError("sweep: jobs must be >= 1");
    if (spec.parameter == SweptParameter::PumpToStokesRatio && !spec.stokes_reference)
        throw DomainError("sweep: ratio sweeps need a fixed Stokes reference value");
    if (spec.stokes_reference && !(*spec.stokes_reference >= 0.0))
        throw DomainError("sweep: Stokes reference must be >= 0");
    validate(spec.base);
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
    std::vector<double> v(spec.points);
    const double step = (spec.hi - spec.lo) / (spec.points - 1);
    for (int k = 0; k < spec.points; ++k) v[k] = spec.lo + k * step;
    v.back() = spec.hi;
    return v;
}

SchemeSpec instantiate(const SweepSpec& spec, double value) {
    SchemeSpec s = spec.base;
    switch (spec.parameter) {
    case SweptParameter::EqualPeakRabi:
        s.pump.peak_rabi = value;
        s.stokes.peak_rabi = value;
        break;
    case SweptParameter::PumpToStokesRatio:
        s.stokes.peak_rabi = *spec.stokes_reference;
        s.pump.peak_rabi = value * *spec.stokes_reference;
        break;
    case SweptParameter::ChirpRate:
        s.pump.chirp_rate = value;
        if (s.case_tag == CaseTag::BothChirped) s.stokes.chirp_rate = value;
        break;
    case SweptParameter::PulseWidth:
        if (s.pump.shape == EnvelopeShape::Gaussian) s.pump.width = value;
        if (s.stokes.shape == EnvelopeShape::Gaussian) s.stokes.width = value;
        break;
    }
    return s;
}

FinalPopulations final_populations(const Trajectory& traj) {
    if (traj.size() == 0) throw DomainError("final_populations: empty trajectory");
    const double peak = *std::max_element(traj.p_i.begin(), traj.p_i.end());
    return {traj.p_g.back(), traj.p_i.back(), traj.p_r.back(), peak};
}

SweepResult run_sweep(const SweepSpec& spec) {
    validate(spec);
    const std::vector<double> grid = sweep_grid(spec);

    SweepResult result;
    result.parameter = spec.parameter;
    result.model = spec.model;
    result.metadata = {
        fmt::format("parameter={}", to_string(spec.parameter)),
        fmt::format("range={:.12g}..{:.12g}", spec.lo, spec.hi),
        fmt::format("points={}", spec.points),
        fmt::format("model={}", to_string(spec.model)),
        fmt::format("case={}", to_string(spec.base.case_tag)),
        fmt::format("gamma_ig_mhz={:.12g}", spec.base.atom.gamma_ig),
        fmt::format("gamma_ri_mhz={:.12g}", spec.base.atom.gamma_ri),
        fmt::format("units_2pi=rabi:{:d},detuning:{:d},chirp:{:d},decay:{:d}",
                    spec.base.units.rabi_angular, spec.base.units.detuning_angular,
                    spec.base.units.chirp_angular, spec.base.units.decay_angular),
    };
    if (spec.stokes_reference)
        result.metadata.push_back(fmt::format("stokes_reference_mhz={:.12g}", *spec.stokes_reference));
    result.rows.resize(grid.size());

    auto evaluate = [&](std::size_t k) {
        SweepRow& row = result.rows[k];
        row.value = grid[k];
        try {
            const SchemeSpec s = instantiate(spec, grid[k]);
            const AdiabaticityReport rep = adiabaticity_report(s, 2001);
            row.lz_probability = rep.lz_probability;
            row.omega_eff_peak = rep.omega_eff_peak;
            row.alpha_tau2 = rep.alpha_tau2_pump;
            const FinalPopulations f = final_populations(propagate(spec.model, s, spec.options));
            row.p_g = f.p_g;
            row.p_i = f.p_i;
            row.p_r = f.p_r;
            row.p_i_peak = f.p_i_peak;
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    };

    const std::size_t workers = std::min<std::size_t>(spec.jobs, grid.size());
    if (workers <= 1) {
        for (std::size_t k = 0; k < grid.size(); ++k) evaluate(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < grid.size(); k = next++) evaluate(k);
            });
    }
    return result;
}

}  // namespace arpsim
