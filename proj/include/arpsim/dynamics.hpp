#pragma once

// Time propagation of the g-i-r ladder in the rotating frame: pure-state
// amplitudes, the Lindblad density matrix with the two radiative decay
// channels, and the adiabatically eliminated two-level model.

#include <array>
#include <complex>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "arpsim/model.hpp"
#include "arpsim/ode.hpp"

namespace arpsim {

using cplx = std::complex<double>;

enum class Model { Schrodinger, Lindblad, Effective };

std::string_view to_string(Model model);
Model parse_model(std::string_view text);

struct AmplitudeState {
    cplx g{1.0, 0.0};
    cplx i{};
    cplx r{};

    double norm2() const { return std::norm(g) + std::norm(i) + std::norm(r); }
};

struct TwoLevelState {
    cplx g{1.0, 0.0};
    cplx r{};

    double norm2() const { return std::norm(g) + std::norm(r); }
};

// 3x3 density matrix over the basis (g, i, r).
struct DensityMatrix3 {
    Eigen::Matrix3cd rho = ground_matrix();

    static Eigen::Matrix3cd ground_matrix() {
        Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
        m(0, 0) = 1.0;
        return m;
    }
    static DensityMatrix3 pure(const AmplitudeState& psi);

    double trace() const { return rho.trace().real(); }
    // max |rho - rho^dagger| over all elements
    double hermiticity_error() const;
    double min_eigenvalue() const;
};

using InitialState = std::variant<AmplitudeState, DensityMatrix3, TwoLevelState>;

// Right-hand sides, all frequencies taken in rad/us from the scheme.
AmplitudeState schrodinger_rhs(const AmplitudeState& state, const SchemeSpec& scheme, double t);
DensityMatrix3 lindblad_rhs(const DensityMatrix3& rho, const SchemeSpec& scheme, double t);
TwoLevelState effective_rhs(const TwoLevelState& c, const SchemeSpec& scheme, double t);

// Throws DomainError unless |Delta(t)| > 10 max(Omega_p, Omega_S) over the
// whole integration window.
void check_elimination_validity(const SchemeSpec& scheme);

struct PropagateOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int n_samples = 2000;
    bool record_coherences = false;
    // Abort when a conservation law drifts beyond this multiple of rel_tol.
    double invariant_factor = 100.0;
};

// Worst deviations observed at the sample points.
struct InvariantSummary {
    double max_norm_drift = 0.0;   // |norm^2 - 1| or |Tr rho - 1|
    double max_hermiticity = 0.0;  // Lindblad only
    double min_eigenvalue = 1.0;   // Lindblad only
};

struct Trajectory {
    Model model = Model::Lindblad;
    SchemeSpec scheme;
    std::vector<double> t;
    std::vector<double> p_g, p_i, p_r;
    // |rho_gi|, |rho_ir|, |rho_gr| per sample when requested.
    std::vector<std::array<double, 3>> coherences;
    ode::Stats stats;
    InvariantSummary invariants;
    std::variant<AmplitudeState, DensityMatrix3, TwoLevelState> final_state;

    std::size_t size() const { return t.size(); }
};

// Adaptive Dormand-Prince propagation over [t_start, t_end] with output
// resampled to n_samples uniform times (both ends included). The initial
// state defaults to the ground state of the chosen model.
//
// Throws DomainError on bad options or an initial state of the wrong kind,
// NumericalError on step underflow or an invariant violation.
Trajectory propagate(Model model, const SchemeSpec& scheme, const PropagateOptions& options = {});
Trajectory propagate(Model model, const SchemeSpec& scheme, const InitialState& initial,
                     const PropagateOptions& options);

}  // namespace arpsim
