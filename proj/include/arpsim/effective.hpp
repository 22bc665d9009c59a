#pragma once

// Two-level description obtained by adiabatically eliminating the
// far-detuned intermediate state: Stark shifts, two-photon Rabi frequency,
// dressed energies and mixing angle, plus adiabaticity diagnostics.
//
// The scalar formulas are unit-agnostic (any consistent frequency unit).
// Scheme-level functions evaluate in rad/us and report in MHz.

#include <array>
#include <optional>
#include <string>

#include "arpsim/model.hpp"

namespace arpsim {

struct StarkShifts {
    double ground;   // Delta_g = Omega_p^2 / 4 Delta
    double rydberg;  // Delta_r = Omega_S^2 / 4 Delta
};

struct DressedEnergies {
    double plus;
    double minus;
};

// Components on (|g>, |r>) of |+> and |->.
struct DressedCoefficients {
    double g_plus;
    double r_plus;
    double g_minus;
    double r_minus;
};

struct DressedSnapshot {
    double t;            // us
    double omega_eff;    // MHz
    double stark_g;      // MHz
    double stark_r;      // MHz
    double delta_eff;    // MHz
    double lambda_plus;  // MHz
    double lambda_minus; // MHz
    double theta;        // rad
    DressedCoefficients coeffs;
};

// Throws DomainError when delta == 0.
double effective_rabi(double omega_p, double omega_s, double delta);
StarkShifts stark_shifts(double omega_p, double omega_s, double delta);
double effective_detuning(double small_delta, double omega_p, double omega_s, double delta);

DressedEnergies dressed_energies(double stark_g, double stark_r, double small_delta,
                                 double omega_eff);

// Mixing angle in [0, pi/2]; tan(theta) = (sqrt(W^2 + D^2) - D) / W with
// W = |omega_eff| and D = delta_eff. Throws DomainError when both vanish.
double mixing_angle(double omega_eff, double delta_eff);

// |+> = sin(theta)|g> - cos(theta)|r>,  |-> = cos(theta)|g> + sin(theta)|r>.
DressedCoefficients dressed_coefficients(double theta);
// Same, with the |r> components negated when omega_eff < 0 (a negative
// one-photon detuning), so the pairs stay eigenvectors of the generator below.
DressedCoefficients dressed_coefficients(double theta, double omega_eff);

// Real symmetric generator of the eliminated two-level dynamics,
// i d/dt (c_g, c_r) = H (c_g, c_r), row-major {H_gg, H_gr, H_rg, H_rr}.
std::array<double, 4> effective_hamiltonian(double stark_g, double stark_r, double small_delta,
                                            double omega_eff);

DressedSnapshot snapshot(const SchemeSpec& scheme, double t);

struct AdiabaticityReport {
    bool no_sweep = false;  // both chirp rates zero: ARP inapplicable
    double alpha_tau2_pump = 0.0;
    std::optional<double> beta_tau2_stokes;  // absent for a CW Stokes field
    double omega_eff_peak = 0.0;             // MHz
    double t_peak = 0.0;                     // us
    double alpha_eff = 0.0;                  // alpha + beta, MHz/us
    double sweep_ratio_plain = 0.0;          // |alpha_eff| / Omega_eff_peak^2 (plain units)
    double sweep_ratio_angular = 0.0;        // same in rad/us units
    double max_local_ratio = 0.0;            // max |dDelta_eff/dt| / Omega_eff^2 (angular)
    double t_max_local_ratio = 0.0;
    double lz_probability = 1.0;             // exp(-pi W^2 / 2|alpha_eff|), angular

    // Thresholds used by the `check` command.
    static constexpr double min_alpha_tau2 = 3.0;
    static constexpr double max_lz_probability = 0.01;

    bool passes() const;
    std::string verdict() const;  // "pass", "warn" or "inapplicable"
};

// n_grid >= 2 uniform points over [t_start, t_end]; the local ratio ignores
// times where Omega_eff < 1% of its peak.
AdiabaticityReport adiabaticity_report(const SchemeSpec& scheme, int n_grid = 4001);

}  // namespace arpsim
