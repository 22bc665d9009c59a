#include "arpsim/effective.hpp"

#include <cmath>
#include <limits>
#include <vector>
#include <numbers>

#include <fmt/format.h>

#include "arpsim/errors.hpp"
#include "arpsim/units.hpp"

namespace arpsim {

namespace {

void require_detuning(double delta, const char* what) {
    if (delta == 0.0 || !std::isfinite(delta))
        throw DomainError(fmt::format(
            "{}: one-photon detuning must be finite and nonzero for adiabatic elimination", what));
}

// Derivative of a field's Rabi frequency, same units as rabi_at per us.
double rabi_slope(const FieldSpec& field, double t) {
    if (field.shape == EnvelopeShape::ConstantCW) return 0.0;
    return -rabi_at(field, t) * (t - field.center_time) / (field.width * field.width);
}

constexpr double local_ratio_floor = 0.01;

}  // namespace

double effective_rabi(double omega_p, double omega_s, double delta) {
    require_detuning(delta, "effective_rabi");
    return omega_p * omega_s / (2.0 * delta);
}

StarkShifts stark_shifts(double omega_p, double omega_s, double delta) {
    require_detuning(delta, "stark_shifts");
    return {omega_p * omega_p / (4.0 * delta), omega_s * omega_s / (4.0 * delta)};
}

double effective_detuning(double small_delta, double omega_p, double omega_s, double delta) {
    require_detuning(delta, "effective_detuning");
    return small_delta - (omega_s * omega_s - omega_p * omega_p) / (4.0 * delta);
}

DressedEnergies dressed_energies(double stark_g, double stark_r, double small_delta,
                                 double omega_eff) {
    const double half_gap = 0.5 * (small_delta - stark_r + stark_g);
    const double root = std::hypot(half_gap, 0.5 * omega_eff);
    return {-stark_g + half_gap + root, -stark_g + half_gap - root};
}

double mixing_angle(double omega_eff, double delta_eff) {
    const double w = std::abs(omega_eff);
    if (w == 0.0 && delta_eff == 0.0)
        throw DomainError("mixing_angle: undefined for zero effective Rabi frequency and detuning");
    const double r = std::hypot(w, delta_eff);
    // For delta_eff > 0 use tan(theta) = W / (R + D), free of cancellation.
    if (delta_eff > 0.0) return std::atan2(w, r + delta_eff);
    return std::atan2(r - delta_eff, w);
}

DressedCoefficients dressed_coefficients(double theta) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    return {s, -c, c, s};
}

DressedCoefficients dressed_coefficients(double theta, double omega_eff) {
    DressedCoefficients d = dressed_coefficients(theta);
    if (omega_eff < 0.0) {
        d.r_plus = -d.r_plus;
        d.r_minus = -d.r_minus;
    }
    return d;
}

std::array<double, 4> effective_hamiltonian(double stark_g, double stark_r, double small_delta,
                                            double omega_eff) {
    // Coupling is Omega_eff / 2: c_i ~ (Omega_p c_g + Omega_S c_r) / 2 Delta
    // inserted into -(Omega_p / 2) c_i gives Omega_p Omega_S / 4 Delta.
    return {-stark_g, -0.5 * omega_eff, -0.5 * omega_eff, small_delta - stark_r};
}

DressedSnapshot snapshot(const SchemeSpec& scheme, double t) {
    const AngularCoefficients a = angular_coefficients_at(scheme, t);
    const double w = effective_rabi(a.omega_p, a.omega_s, a.one_photon);
    const StarkShifts shifts = stark_shifts(a.omega_p, a.omega_s, a.one_photon);
    const double d_eff = effective_detuning(a.two_photon, a.omega_p, a.omega_s, a.one_photon);
    const DressedEnergies e = dressed_energies(shifts.ground, shifts.rydberg, a.two_photon, w);
    const double theta = mixing_angle(w, d_eff);
    return {t,
            from_angular(w),
            from_angular(shifts.ground),
            from_angular(shifts.rydberg),
            from_angular(d_eff),
            from_angular(e.plus),
            from_angular(e.minus),
            theta,
            dressed_coefficients(theta, w)};
}

bool AdiabaticityReport::passes() const {
    if (no_sweep) return false;
    // Only chirped fields carry an alpha tau^2 condition.
    const bool pump_ok = alpha_tau2_pump == 0.0 || std::abs(alpha_tau2_pump) >= min_alpha_tau2;
    const bool stokes_ok = !beta_tau2_stokes || *beta_tau2_stokes == 0.0 ||
                           std::abs(*beta_tau2_stokes) >= min_alpha_tau2;
    return pump_ok && stokes_ok && lz_probability <= max_lz_probability;
}

std::string AdiabaticityReport::verdict() const {
    if (no_sweep) return "inapplicable";
    return passes() ? "pass" : "warn";
}

AdiabaticityReport adiabaticity_report(const SchemeSpec& scheme, int n_grid) {
    if (n_grid < 2) throw DomainError("adiabaticity_report: n_grid must be >= 2");
    validate(scheme);
    const UnitConvention& u = scheme.units;

    AdiabaticityReport rep;
    rep.alpha_eff = two_photon_chirp(scheme);
    rep.no_sweep = scheme.pump.chirp_rate == 0.0 && scheme.stokes.chirp_rate == 0.0;
    rep.alpha_tau2_pump = scheme.pump.chirp_rate * scheme.pump.width * scheme.pump.width;
    if (scheme.stokes.shape == EnvelopeShape::Gaussian)
        rep.beta_tau2_stokes = scheme.stokes.chirp_rate * scheme.stokes.width * scheme.stokes.width;

    const double dt = (scheme.t_end - scheme.t_start) / (n_grid - 1);
    std::vector<double> times(n_grid), w(n_grid);
    double w_peak = 0.0;
    for (int k = 0; k < n_grid; ++k) {
        times[k] = k + 1 == n_grid ? scheme.t_end : scheme.t_start + k * dt;
        const AngularCoefficients a = angular_coefficients_at(scheme, times[k]);
        w[k] = std::abs(effective_rabi(a.omega_p, a.omega_s, a.one_photon));
        if (w[k] > w_peak) {
            w_peak = w[k];
            rep.t_peak = times[k];
        }
    }
    rep.omega_eff_peak = from_angular(w_peak);

    const double alpha_eff_ang = u.chirp_scale() * rep.alpha_eff;
    if (w_peak > 0.0) {
        rep.sweep_ratio_plain = std::abs(rep.alpha_eff) / (rep.omega_eff_peak * rep.omega_eff_peak);
        rep.sweep_ratio_angular = std::abs(alpha_eff_ang) / (w_peak * w_peak);
    } else {
        rep.sweep_ratio_plain = rep.sweep_ratio_angular = std::numeric_limits<double>::infinity();
    }
    rep.lz_probability = alpha_eff_ang == 0.0
                             ? 1.0
                             : std::exp(-std::numbers::pi * w_peak * w_peak /
                                        (2.0 * std::abs(alpha_eff_ang)));

    // d(Delta_eff)/dt with Delta_eff = delta - (Os^2 - Op^2) / (4 Delta), analytically.
    const double pump_slope_scale = u.rabi_scale();
    for (int k = 0; k < n_grid; ++k) {
        if (w_peak == 0.0 || w[k] < local_ratio_floor * w_peak) continue;
        const double t = times[k];
        const AngularCoefficients a = angular_coefficients_at(scheme, t);
        const double dop = pump_slope_scale * rabi_slope(scheme.pump, t);
        const double dos = pump_slope_scale * rabi_slope(scheme.stokes, t);
        const double d_one = -u.chirp_scale() * scheme.pump.chirp_rate;
        const double d_two = -alpha_eff_ang;
        const double num = a.omega_s * a.omega_s - a.omega_p * a.omega_p;
        const double dnum = 2.0 * (a.omega_s * dos - a.omega_p * dop);
        const double slope =
            d_two - (dnum * a.one_photon - num * d_one) / (4.0 * a.one_photon * a.one_photon);
        const double ratio = std::abs(slope) / (w[k] * w[k]);
        if (ratio > rep.max_local_ratio) {
            rep.max_local_ratio = ratio;
            rep.t_max_local_ratio = t;
        }
    }
    return rep;
}

}  // namespace arpsim
