#include "arpsim/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "arpsim/effective.hpp"
#include "arpsim/errors.hpp"

namespace arpsim {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double elimination_margin = 10.0;

// Rotating-frame Hamiltonian in rad/us.
Eigen::Matrix3cd hamiltonian(const AngularCoefficients& a) {
    Eigen::Matrix3cd h;
    h << 0.0, -0.5 * a.omega_p, 0.0,
         -0.5 * a.omega_p, a.one_photon, -0.5 * a.omega_s,
         0.0, -0.5 * a.omega_s, a.two_photon;
    return h;
}

struct EffectiveCoefficients {
    double h_gg, coupling, h_rr;
};

EffectiveCoefficients effective_coefficients(const SchemeSpec& scheme, double t) {
    const AngularCoefficients a = angular_coefficients_at(scheme, t);
    const double w = effective_rabi(a.omega_p, a.omega_s, a.one_photon);
    const StarkShifts s = stark_shifts(a.omega_p, a.omega_s, a.one_photon);
    const auto h = effective_hamiltonian(s.ground, s.rydberg, a.two_photon, w);
    return {h[0], h[1], h[3]};
}

// Packing of model states into flat real arrays for the integrator.
ode::State<6> pack(const AmplitudeState& s) {
    return {s.g.real(), s.g.imag(), s.i.real(), s.i.imag(), s.r.real(), s.r.imag()};
}
AmplitudeState unpack_amplitudes(const ode::State<6>& y) {
    return {{y[0], y[1]}, {y[2], y[3]}, {y[4], y[5]}};
}
ode::State<4> pack(const TwoLevelState& s) {
    return {s.g.real(), s.g.imag(), s.r.real(), s.r.imag()};
}
TwoLevelState unpack_two_level(const ode::State<4>& y) { return {{y[0], y[1]}, {y[2], y[3]}}; }

ode::State<18> pack(const DensityMatrix3& d) {
    ode::State<18> y;
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 3; ++r) {
            const int k = 2 * (3 * c + r);
            y[k] = d.rho(r, c).real();
            y[k + 1] = d.rho(r, c).imag();
        }
    return y;
}
Eigen::Map<const Eigen::Matrix3cd> view_matrix(const ode::State<18>& y) {
    return Eigen::Map<const Eigen::Matrix3cd>(reinterpret_cast<const cplx*>(y.data()));
}
Eigen::Map<Eigen::Matrix3cd> view_matrix(ode::State<18>& y) {
    return Eigen::Map<Eigen::Matrix3cd>(reinterpret_cast<cplx*>(y.data()));
}

void lindblad_into(const Eigen::Matrix3cd& rho, const SchemeSpec& scheme, double t,
                   Eigen::Matrix3cd& out) {
    const AngularCoefficients a = angular_coefficients_at(scheme, t);
    const Eigen::Matrix3cd h = hamiltonian(a);
    out.noalias() = -I * (h * rho - rho * h);

    // Trace-preserving dissipator for |i> -> |g> (rate a) and |r> -> |i> (rate b):
    // Gamma (s rho s^+ - {s^+ s, rho} / 2).
    const double ga = scheme.units.decay_scale() * scheme.atom.gamma_ig;
    const double gb = scheme.units.decay_scale() * scheme.atom.gamma_ri;
    out(0, 0) += ga * rho(1, 1);
    out(1, 1) += -ga * rho(1, 1) + gb * rho(2, 2);
    out(2, 2) += -gb * rho(2, 2);
    const double gi = 0.5 * ga, ir = 0.5 * (ga + gb), gr = 0.5 * gb;
    out(0, 1) -= gi * rho(0, 1);
    out(1, 0) -= gi * rho(1, 0);
    out(1, 2) -= ir * rho(1, 2);
    out(2, 1) -= ir * rho(2, 1);
    out(0, 2) -= gr * rho(0, 2);
    out(2, 0) -= gr * rho(2, 0);
}

void check_options(const PropagateOptions& o) {
    if (!(o.rel_tol > 0.0 && o.rel_tol <= 1e-3))
        throw DomainError(fmt::format("rel_tol must lie in (0, 1e-3], got {}", o.rel_tol));
    if (!(o.abs_tol > 0.0 && o.abs_tol <= 1e-3))
        throw DomainError(fmt::format("abs_tol must lie in (0, 1e-3], got {}", o.abs_tol));
    if (o.n_samples < 2) throw DomainError("n_samples must be >= 2");
}

std::vector<double> sample_times(const SchemeSpec& s, int n) {
    std::vector<double> t(n);
    const double dt = (s.t_end - s.t_start) / (n - 1);
    for (int k = 0; k < n; ++k) t[k] = s.t_start + k * dt;
    t.back() = s.t_end;
    return t;
}

// Shared driver: integrates, records a sample through `record` at each
// uniform output time, and returns the final packed state.
template <std::size_t N, class Rhs, class Record>
ode::State<N> run(const SchemeSpec& scheme, const PropagateOptions& opt, ode::State<N> y0,
                  Rhs&& rhs, Record&& record, ode::Stats& stats) {
    const std::vector<double> times = sample_times(scheme, opt.n_samples);
    std::size_t next = 0;
    record(times[next++], y0);

    ode::Options o;
    o.rel_tol = opt.rel_tol;
    o.abs_tol = opt.abs_tol;
    auto observer = [&](const ode::DenseStep<N>& step, const ode::State<N>& y_new) {
        const double t_new = step.t0 + step.h;
        while (next < times.size() && times[next] < t_new) {
            record(times[next], step(times[next]));
            ++next;
        }
        if (next + 1 == times.size() && times[next] <= t_new) {
            record(times[next], y_new);
            ++next;
        }
    };
    ode::State<N> y = ode::integrate<N>(rhs, y0, scheme.t_start, scheme.t_end, o, stats, observer);
    while (next < times.size()) record(times[next++], y);
    return y;
}

void reserve(Trajectory& tr, int n) {
    tr.t.reserve(n);
    tr.p_g.reserve(n);
    tr.p_i.reserve(n);
    tr.p_r.reserve(n);
}

}  // namespace

std::string_view to_string(Model model) {
    switch (model) {
    case Model::Schrodinger: return "schrodinger";
    case Model::Lindblad: return "lindblad";
    case Model::Effective: return "effective";
    }
    return "?";
}

Model parse_model(std::string_view text) {
    if (text == "schrodinger") return Model::Schrodinger;
    if (text == "lindblad") return Model::Lindblad;
    if (text == "effective") return Model::Effective;
    throw DomainError(
        fmt::format("unknown model '{}' (expected lindblad|schrodinger|effective)", text));
}

DensityMatrix3 DensityMatrix3::pure(const AmplitudeState& psi) {
    Eigen::Vector3cd v(psi.g, psi.i, psi.r);
    return {v * v.adjoint()};
}

double DensityMatrix3::hermiticity_error() const {
    return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix3::min_eigenvalue() const {
    const Eigen::Matrix3cd herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

AmplitudeState schrodinger_rhs(const AmplitudeState& c, const SchemeSpec& scheme, double t) {
    const AngularCoefficients a = angular_coefficients_at(scheme, t);
    // i dc/dt = H c with real Rabi frequencies.
    const cplx hg = -0.5 * a.omega_p * c.i;
    const cplx hi = a.one_photon * c.i - 0.5 * a.omega_p * c.g - 0.5 * a.omega_s * c.r;
    const cplx hr = a.two_photon * c.r - 0.5 * a.omega_s * c.i;
    return {-I * hg, -I * hi, -I * hr};
}

DensityMatrix3 lindblad_rhs(const DensityMatrix3& rho, const SchemeSpec& scheme, double t) {
    DensityMatrix3 out;
    lindblad_into(rho.rho, scheme, t, out.rho);
    return out;
}

TwoLevelState effective_rhs(const TwoLevelState& c, const SchemeSpec& scheme, double t) {
    const EffectiveCoefficients h = effective_coefficients(scheme, t);
    return {-I * (h.h_gg * c.g + h.coupling * c.r), -I * (h.coupling * c.g + h.h_rr * c.r)};
}

void check_elimination_validity(const SchemeSpec& scheme) {
    const UnitConvention& u = scheme.units;
    const double omega_max =
        u.rabi_scale() * std::max(scheme.pump.peak_rabi, scheme.stokes.peak_rabi);
    // Delta(t) is affine, so its smallest magnitude sits at an end point or a root.
    const AngularCoefficients lo = angular_coefficients_at(scheme, scheme.t_start);
    const AngularCoefficients hi = angular_coefficients_at(scheme, scheme.t_end);
    double min_delta = std::min(std::abs(lo.one_photon), std::abs(hi.one_photon));
    if ((lo.one_photon > 0.0) != (hi.one_photon > 0.0)) min_delta = 0.0;
    if (!(min_delta > elimination_margin * omega_max))
        throw DomainError(fmt::format(
            "effective model invalid: min |Delta(t)| = {:.6g} rad/us over the window is not above "
            "{} x max Rabi frequency {:.6g} rad/us",
            min_delta, elimination_margin, omega_max));
}

Trajectory propagate(Model model, const SchemeSpec& scheme, const PropagateOptions& options) {
    switch (model) {
    case Model::Schrodinger: return propagate(model, scheme, AmplitudeState{}, options);
    case Model::Lindblad: return propagate(model, scheme, DensityMatrix3{}, options);
    case Model::Effective: return propagate(model, scheme, TwoLevelState{}, options);
    }
    throw DomainError("propagate: unknown model");
}

Trajectory propagate(Model model, const SchemeSpec& scheme, const InitialState& initial,
                     const PropagateOptions& opt) {
    validate(scheme);
    check_options(opt);

    Trajectory tr;
    tr.model = model;
    tr.scheme = scheme;
    reserve(tr, opt.n_samples);
    const double limit = opt.invariant_factor * opt.rel_tol;

    auto violation = [&](const char* what, double value, double t) {
        throw NumericalError(fmt::format("{} = {:.3e} exceeds {:.3e} at t = {:.9g} us", what,
                                         value, limit, t),
                             t);
    };

    switch (model) {
    case Model::Schrodinger: {
        const auto* init = std::get_if<AmplitudeState>(&initial);
        if (!init) throw DomainError("schrodinger model needs an amplitude initial state");
        if (std::abs(init->norm2() - 1.0) > 1e-12)
            throw DomainError("initial amplitudes must be normalized");
        auto rhs = [&](double t, const ode::State<6>& y, ode::State<6>& dy) {
            dy = pack(schrodinger_rhs(unpack_amplitudes(y), scheme, t));
        };
        auto record = [&](double t, const ode::State<6>& y) {
            const AmplitudeState c = unpack_amplitudes(y);
            tr.t.push_back(t);
            tr.p_g.push_back(std::norm(c.g));
            tr.p_i.push_back(std::norm(c.i));
            tr.p_r.push_back(std::norm(c.r));
            if (opt.record_coherences)
                tr.coherences.push_back({std::abs(c.g * std::conj(c.i)),
                                         std::abs(c.i * std::conj(c.r)),
                                         std::abs(c.g * std::conj(c.r))});
            const double drift = std::abs(c.norm2() - 1.0);
            tr.invariants.max_norm_drift = std::max(tr.invariants.max_norm_drift, drift);
            if (drift > limit) violation("norm drift", drift, t);
        };
        const auto y = run<6>(scheme, opt, pack(*init), rhs, record, tr.stats);
        tr.final_state = unpack_amplitudes(y);
        break;
    }
    case Model::Lindblad: {
        const auto* init = std::get_if<DensityMatrix3>(&initial);
        if (!init) throw DomainError("lindblad model needs a density-matrix initial state");
        if (std::abs(init->trace() - 1.0) > 1e-12 || init->hermiticity_error() > 1e-12 ||
            init->min_eigenvalue() < -1e-12)
            throw DomainError("initial density matrix must be Hermitian, positive, unit trace");
        auto rhs = [&](double t, const ode::State<18>& y, ode::State<18>& dy) {
            Eigen::Map<Eigen::Matrix3cd> out = view_matrix(dy);
            Eigen::Matrix3cd tmp;
            lindblad_into(view_matrix(y), scheme, t, tmp);
            out = tmp;
        };
        auto record = [&](double t, const ode::State<18>& y) {
            const DensityMatrix3 d{view_matrix(y)};
            tr.t.push_back(t);
            tr.p_g.push_back(d.rho(0, 0).real());
            tr.p_i.push_back(d.rho(1, 1).real());
            tr.p_r.push_back(d.rho(2, 2).real());
            if (opt.record_coherences)
                tr.coherences.push_back(
                    {std::abs(d.rho(0, 1)), std::abs(d.rho(1, 2)), std::abs(d.rho(0, 2))});
            const double drift = std::abs(d.trace() - 1.0);
            const double herm = d.hermiticity_error();
            const double lmin = d.min_eigenvalue();
            InvariantSummary& inv = tr.invariants;
            inv.max_norm_drift = std::max(inv.max_norm_drift, drift);
            inv.max_hermiticity = std::max(inv.max_hermiticity, herm);
            inv.min_eigenvalue = std::min(inv.min_eigenvalue, lmin);
            if (drift > limit) violation("trace drift", drift, t);
            if (herm > limit) violation("hermiticity error", herm, t);
            if (lmin < -limit) violation("negative eigenvalue magnitude", -lmin, t);
        };
        const auto y = run<18>(scheme, opt, pack(*init), rhs, record, tr.stats);
        tr.final_state = DensityMatrix3{view_matrix(y)};
        break;
    }
    case Model::Effective: {
        const auto* init = std::get_if<TwoLevelState>(&initial);
        if (!init) throw DomainError("effective model needs a two-level initial state");
        if (std::abs(init->norm2() - 1.0) > 1e-12)
            throw DomainError("initial amplitudes must be normalized");
        check_elimination_validity(scheme);
        // Integrate b_r = c_r exp(i phi(t)) with phi the integral of the (affine)
        // two-photon detuning, so the free rotation of |r> after the pulses
        // does not accumulate integrator error.
        const double t0 = scheme.t_start;
        const double d0 = angular_coefficients_at(scheme, t0).two_photon;
        const double slope = (angular_coefficients_at(scheme, scheme.t_end).two_photon - d0) /
                             (scheme.t_end - t0);
        auto phase = [&](double t) {
            const double u = t - t0;
            return std::polar(1.0, u * (d0 + 0.5 * slope * u));
        };
        auto to_lab = [&](const ode::State<4>& y, double t) {
            TwoLevelState c = unpack_two_level(y);
            c.r *= std::conj(phase(t));
            return c;
        };
        auto rhs = [&](double t, const ode::State<4>& y, ode::State<4>& dy) {
            const EffectiveCoefficients h = effective_coefficients(scheme, t);
            const double delta = angular_coefficients_at(scheme, t).two_photon;
            const cplx e = phase(t);
            const TwoLevelState b = unpack_two_level(y);
            dy = pack(TwoLevelState{-I * (h.h_gg * b.g + h.coupling * std::conj(e) * b.r),
                                    -I * (h.coupling * e * b.g + (h.h_rr - delta) * b.r)});
        };
        auto record = [&](double t, const ode::State<4>& y) {
            const TwoLevelState c = to_lab(y, t);
            tr.t.push_back(t);
            tr.p_g.push_back(std::norm(c.g));
            tr.p_i.push_back(0.0);
            tr.p_r.push_back(std::norm(c.r));
            if (opt.record_coherences)
                tr.coherences.push_back({0.0, 0.0, std::abs(c.g * std::conj(c.r))});
            const double drift = std::abs(c.norm2() - 1.0);
            tr.invariants.max_norm_drift = std::max(tr.invariants.max_norm_drift, drift);
            if (drift > limit) violation("norm drift", drift, t);
        };
        const auto y = run<4>(scheme, opt, pack(*init), rhs, record, tr.stats);
        tr.final_state = to_lab(y, scheme.t_end);
        break;
    }
    }
    return tr;
}

}  // namespace arpsim
