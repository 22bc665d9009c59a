#include "arpsim/model.hpp"

#include <cmath>
#include <fmt/format.h>

#include "arpsim/errors.hpp"

namespace arpsim {

namespace {

constexpr double window_sigmas = 5.0;

bool finite(double x) { return std::isfinite(x); }

}  // namespace

std::string_view to_string(EnvelopeShape shape) {
    switch (shape) {
    case EnvelopeShape::Gaussian: return "gaussian";
    case EnvelopeShape::ConstantCW: return "cw";
    }
    return "?";
}

std::string_view to_string(CaseTag tag) {
    switch (tag) {
    case CaseTag::BothChirped: return "both_chirped";
    case CaseTag::PumpOnlyChirped: return "pump_only_chirped";
    case CaseTag::PumpChirpedStokesCW: return "pump_chirped_stokes_cw";
    }
    return "?";
}

EnvelopeShape parse_shape(std::string_view text) {
    if (text == "gaussian") return EnvelopeShape::Gaussian;
    if (text == "cw") return EnvelopeShape::ConstantCW;
    throw DomainError(fmt::format("unknown envelope shape '{}' (expected gaussian|cw)", text));
}

CaseTag parse_case_tag(std::string_view text) {
    if (text == "both_chirped") return CaseTag::BothChirped;
    if (text == "pump_only_chirped") return CaseTag::PumpOnlyChirped;
    if (text == "pump_chirped_stokes_cw") return CaseTag::PumpChirpedStokesCW;
    throw DomainError(fmt::format(
        "unknown case tag '{}' (expected both_chirped|pump_only_chirped|pump_chirped_stokes_cw)",
        text));
}

void validate(const FieldSpec& field, std::string_view name) {
    if (!finite(field.peak_rabi) || !finite(field.center_time) || !finite(field.width) ||
        !finite(field.chirp_rate) || !finite(field.chirp_center))
        throw DomainError(fmt::format("{}: non-finite parameter", name));
    if (field.peak_rabi < 0.0)
        throw DomainError(fmt::format("{}: peak_rabi must be >= 0, got {}", name, field.peak_rabi));
    if (field.shape == EnvelopeShape::Gaussian && !(field.width > 0.0))
        throw DomainError(fmt::format("{}: Gaussian width must be > 0, got {}", name, field.width));
}

void validate(const AtomSpec& atom) {
    if (!finite(atom.delta0) || !finite(atom.small_delta0) || !finite(atom.gamma_ig) ||
        !finite(atom.gamma_ri))
        throw DomainError("atom: non-finite parameter");
    if (atom.gamma_ig < 0.0) throw DomainError("atom: gamma_ig must be >= 0");
    if (atom.gamma_ri < 0.0) throw DomainError("atom: gamma_ri must be >= 0");
}

void validate(const SchemeSpec& scheme) {
    validate(scheme.pump, "pump");
    validate(scheme.stokes, "stokes");
    validate(scheme.atom);
    if (!finite(scheme.t_start) || !finite(scheme.t_end) || !(scheme.t_start < scheme.t_end))
        throw DomainError(fmt::format("scheme: need t_start < t_end, got [{}, {}]",
                                      scheme.t_start, scheme.t_end));

    switch (scheme.case_tag) {
    case CaseTag::BothChirped:
        if (scheme.stokes.shape != EnvelopeShape::Gaussian)
            throw DomainError("scheme: case both_chirped requires a Gaussian Stokes pulse");
        break;
    case CaseTag::PumpOnlyChirped:
        if (scheme.stokes.shape != EnvelopeShape::Gaussian)
            throw DomainError("scheme: case pump_only_chirped requires a Gaussian Stokes pulse");
        if (scheme.stokes.chirp_rate != 0.0)
            throw DomainError("scheme: case pump_only_chirped requires stokes.chirp_rate = 0");
        break;
    case CaseTag::PumpChirpedStokesCW:
        if (scheme.stokes.shape != EnvelopeShape::ConstantCW)
            throw DomainError("scheme: case pump_chirped_stokes_cw requires a CW Stokes field");
        if (scheme.stokes.chirp_rate != 0.0)
            throw DomainError("scheme: case pump_chirped_stokes_cw requires stokes.chirp_rate = 0");
        break;
    }
}

std::vector<std::string> scheme_warnings(const SchemeSpec& scheme) {
    std::vector<std::string> out;
    auto check = [&](const FieldSpec& f, std::string_view name) {
        if (f.shape != EnvelopeShape::Gaussian) return;
        const double lo = f.center_time - window_sigmas * f.width;
        const double hi = f.center_time + window_sigmas * f.width;
        if (scheme.t_start > lo || scheme.t_end < hi)
            out.push_back(fmt::format(
                "{} pulse [{:.6g}, {:.6g}] us (center +/- 5 width) not covered by window [{:.6g}, {:.6g}] us",
                name, lo, hi, scheme.t_start, scheme.t_end));
    };
    check(scheme.pump, "pump");
    check(scheme.stokes, "stokes");
    if (scheme.pump.chirp_rate == 0.0 && scheme.stokes.chirp_rate == 0.0)
        out.emplace_back("no frequency sweep on either field; ARP inapplicable");
    return out;
}

double rabi_at(const FieldSpec& field, double t) {
    if (field.shape == EnvelopeShape::ConstantCW) return field.peak_rabi;
    const double x = (t - field.center_time) / field.width;
    return field.peak_rabi * std::exp(-0.5 * x * x);
}

Detunings detunings_at(const SchemeSpec& scheme, double t) {
    const double pump_offset = scheme.pump.chirp_rate * (t - scheme.pump.chirp_center);
    const double stokes_offset = scheme.stokes.chirp_rate * (t - scheme.stokes.chirp_center);
    return {scheme.atom.delta0 - pump_offset,
            scheme.atom.small_delta0 - pump_offset - stokes_offset};
}

AngularCoefficients angular_coefficients_at(const SchemeSpec& scheme, double t) {
    const UnitConvention& u = scheme.units;
    const double pump_offset =
        u.chirp_scale() * scheme.pump.chirp_rate * (t - scheme.pump.chirp_center);
    const double stokes_offset =
        u.chirp_scale() * scheme.stokes.chirp_rate * (t - scheme.stokes.chirp_center);
    return {u.rabi_scale() * rabi_at(scheme.pump, t),
            u.rabi_scale() * rabi_at(scheme.stokes, t),
            u.detuning_scale() * scheme.atom.delta0 - pump_offset,
            u.detuning_scale() * scheme.atom.small_delta0 - pump_offset - stokes_offset};
}

double two_photon_chirp(const SchemeSpec& scheme) {
    return scheme.pump.chirp_rate + scheme.stokes.chirp_rate;
}

}  // namespace arpsim
