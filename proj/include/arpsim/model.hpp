#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "arpsim/units.hpp"

namespace arpsim {

enum class EnvelopeShape { Gaussian, ConstantCW };

enum class CaseTag { BothChirped, PumpOnlyChirped, PumpChirpedStokesCW };

// One laser field. Frequencies are plain MHz, times in us, chirp in MHz/us.
struct FieldSpec {
    EnvelopeShape shape = EnvelopeShape::Gaussian;
    double peak_rabi = 0.0;     // MHz
    double center_time = 0.0;   // us
    double width = 1.0;         // us, Gaussian only
    double chirp_rate = 0.0;    // MHz/us
    double chirp_center = 0.0;  // us

    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

// Static detunings and radiative decay rates of the g-i-r ladder.
struct AtomSpec {
    double delta0 = 1500.0;       // one-photon detuning, MHz
    double small_delta0 = 0.0;    // two-photon detuning at the chirp center, MHz
    double gamma_ig = 6.0;        // population decay of |i> into |g>, MHz
    double gamma_ri = 3.0e-3;     // population decay of |r> into |i>, MHz

    friend bool operator==(const AtomSpec&, const AtomSpec&) = default;
};

struct SchemeSpec {
    FieldSpec pump;
    FieldSpec stokes;
    AtomSpec atom;
    double t_start = -5.0;  // us
    double t_end = 5.0;     // us
    CaseTag case_tag = CaseTag::BothChirped;
    UnitConvention units{};

    friend bool operator==(const SchemeSpec&, const SchemeSpec&) = default;
};

// Plain-MHz detunings at one instant.
struct Detunings {
    double one_photon;  // Delta(t)
    double two_photon;  // delta(t)
};

// Everything the equations of motion need at time t, in rad/us.
struct AngularCoefficients {
    double omega_p;
    double omega_s;
    double one_photon;
    double two_photon;
};

std::string_view to_string(EnvelopeShape shape);
std::string_view to_string(CaseTag tag);
EnvelopeShape parse_shape(std::string_view text);
CaseTag parse_case_tag(std::string_view text);

// Throws DomainError on any broken invariant of the field, atom or scheme.
void validate(const FieldSpec& field, std::string_view name = "field");
void validate(const AtomSpec& atom);
void validate(const SchemeSpec& scheme);

// Non-fatal findings, e.g. an integration window that clips a pulse.
std::vector<std::string> scheme_warnings(const SchemeSpec& scheme);

double rabi_at(const FieldSpec& field, double t);

// Delta(t) = Delta0 - alpha (t - t0),  delta(t) = delta0 - (alpha + beta)(t - t0).
// Each field is referenced to its own chirp_center; the presets share one t0.
Detunings detunings_at(const SchemeSpec& scheme, double t);

AngularCoefficients angular_coefficients_at(const SchemeSpec& scheme, double t);

// Two-photon sweep rate alpha + beta in MHz/us.
double two_photon_chirp(const SchemeSpec& scheme);

}  // namespace arpsim
