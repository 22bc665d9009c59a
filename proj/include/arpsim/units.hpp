#pragma once

#include <numbers>

namespace arpsim {

// Inputs and outputs use plain frequencies in MHz and times in microseconds,
// so angular frequencies come out in rad/us.
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double to_angular(double mhz) noexcept { return two_pi * mhz; }
constexpr double from_angular(double rad_per_us) noexcept { return rad_per_us / two_pi; }

// Which quantity families receive the 2*pi factor on the way into the
// equations of motion. The physical default applies it everywhere; the
// other combinations exist for calibrating against published figures.
struct UnitConvention {
    bool rabi_angular = true;      // peak Rabi frequencies
    bool detuning_angular = true;  // static detunings Delta0, delta0
    bool chirp_angular = true;     // chirp rates alpha, beta
    bool decay_angular = true;     // population decay rates

    double rabi_scale() const noexcept { return rabi_angular ? two_pi : 1.0; }
    double detuning_scale() const noexcept { return detuning_angular ? two_pi : 1.0; }
    double chirp_scale() const noexcept { return chirp_angular ? two_pi : 1.0; }
    double decay_scale() const noexcept { return decay_angular ? two_pi : 1.0; }

    friend bool operator==(const UnitConvention&, const UnitConvention&) = default;
};

}  // namespace arpsim
