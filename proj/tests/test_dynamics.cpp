#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "arpsim/dynamics.hpp"
#include "arpsim/errors.hpp"
#include "arpsim/experiments.hpp"
#include "arpsim/units.hpp"

using namespace arpsim;
using std::numbers::pi;

namespace {

// Fields switched off, no chirp.
SchemeSpec dark(double t_start, double t_end) {
    SchemeSpec s = preset_case1();
    s.pump.peak_rabi = 0.0;
    s.stokes.peak_rabi = 0.0;
    s.pump.chirp_rate = s.stokes.chirp_rate = 0.0;
    s.t_start = t_start;
    s.t_end = t_end;
    return s;
}

// Resonant CW pump on g-i only, no decay.
SchemeSpec resonant_pump(double rabi) {
    SchemeSpec s = dark(0.0, 0.2);
    s.pump.shape = EnvelopeShape::ConstantCW;
    s.pump.peak_rabi = rabi;
    s.atom.delta0 = 0.0;
    s.atom.gamma_ig = s.atom.gamma_ri = 0.0;
    return s;
}

SchemeSpec no_decay(SchemeSpec s) {
    s.atom.gamma_ig = s.atom.gamma_ri = 0.0;
    return s;
}

Eigen::Matrix3cd random_density(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Eigen::Matrix3cd a;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a(r, c) = cplx(n(rng), n(rng));
    Eigen::Matrix3cd rho = a * a.adjoint();
    return rho / rho.trace().real();
}

double max_abs(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

}  // namespace

TEST_CASE("schrodinger_rhs: free evolution") {
    const SchemeSpec s = dark(-1.0, 1.0);
    const AmplitudeState c{cplx(0.6, 0.0), cplx(0.0, 0.8), cplx(0.0, 0.0)};
    const AmplitudeState d = schrodinger_rhs(c, s, 0.3);
    const AngularCoefficients a = angular_coefficients_at(s, 0.3);
    CHECK(std::abs(d.g) == 0.0);
    CHECK(std::abs(d.i - (-cplx(0, 1) * a.one_photon * c.i)) <= 1e-12);
    CHECK(std::abs(d.r) == 0.0);
}

TEST_CASE("schrodinger_rhs: pump drives the intermediate amplitude") {
    const SchemeSpec s = resonant_pump(10.0);
    const AmplitudeState d = schrodinger_rhs(AmplitudeState{}, s, 0.05);
    CHECK(std::abs(d.g) == 0.0);
    CHECK(d.i.real() == 0.0);
    CHECK(d.i.imag() == doctest::Approx(two_pi * 10.0 / 2));
}

TEST_CASE("schrodinger_rhs: norm derivative vanishes") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    const SchemeSpec s = preset_case1(80.0);
    for (int k = 0; k < 200; ++k) {
        const AmplitudeState c{cplx(n(rng), n(rng)), cplx(n(rng), n(rng)), cplx(n(rng), n(rng))};
        const double t = n(rng);
        const AmplitudeState d = schrodinger_rhs(c, s, t);
        const double dn = 2 * (std::conj(c.g) * d.g + std::conj(c.i) * d.i + std::conj(c.r) * d.r).real();
        CHECK(std::abs(dn) <= 1e-10 * two_pi * 1500.0);
    }
}

TEST_CASE("lindblad_rhs: pure decay of the intermediate state") {
    const SchemeSpec s = dark(0.0, 1.0);
    DensityMatrix3 rho;
    rho.rho.setZero();
    rho.rho(1, 1) = 1.0;
    const DensityMatrix3 d = lindblad_rhs(rho, s, 0.0);
    CHECK(d.rho(1, 1).real() == doctest::Approx(-two_pi * 6.0));
    CHECK(d.rho(0, 0).real() == doctest::Approx(two_pi * 6.0));
}

TEST_CASE("lindblad_rhs: coherence decay rates") {
    const SchemeSpec s = dark(0.0, 1.0);
    const double gi = two_pi * 6.0, gr = two_pi * 3e-3;
    const AngularCoefficients a = angular_coefficients_at(s, 0.0);
    DensityMatrix3 rho;
    rho.rho.setZero();
    rho.rho(0, 1) = rho.rho(1, 0) = 1.0;
    rho.rho(1, 2) = rho.rho(2, 1) = 1.0;
    rho.rho(0, 2) = rho.rho(2, 0) = 1.0;
    const DensityMatrix3 d = lindblad_rhs(rho, s, 0.0);
    const cplx I(0.0, 1.0);
    CHECK(std::abs(d.rho(0, 1) - (-gi / 2 + I * a.one_photon)) <= 1e-9);
    CHECK(std::abs(d.rho(1, 2) - (-(gi + gr) / 2 - I * (a.one_photon - a.two_photon))) <= 1e-9);
    CHECK(std::abs(d.rho(0, 2) - (-gr / 2 + I * a.two_photon)) <= 1e-9);
}

TEST_CASE("lindblad_rhs: traceless and Hermitian for random states") {
    std::mt19937_64 rng(11);
    const SchemeSpec s = preset_case3();
    for (int k = 0; k < 200; ++k) {
        const DensityMatrix3 rho{random_density(rng)};
        const DensityMatrix3 d = lindblad_rhs(rho, s, -0.5 + 0.01 * k);
        CHECK(std::abs(d.rho.trace()) <= 1e-9);
        CHECK((d.rho - d.rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("effective_rhs: frozen without coupling") {
    SchemeSpec s = dark(-1.0, 1.0);
    const TwoLevelState c{cplx(0.6, 0.0), cplx(0.0, 0.8)};
    const TwoLevelState d = effective_rhs(c, s, 0.0);
    CHECK(std::abs(d.g) == 0.0);
    CHECK(std::abs(d.r) == 0.0);
}

TEST_CASE("propagate: resonant Rabi oscillation") {
    const double rabi = 10.0;
    const SchemeSpec s = resonant_pump(rabi);
    for (Model m : {Model::Schrodinger, Model::Lindblad}) {
        const Trajectory tr = propagate(m, s, {});
        double worst = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const double p = std::pow(std::sin(two_pi * rabi * tr.t[k] / 2), 2);
            worst = std::max({worst, std::abs(tr.p_i[k] - p), std::abs(tr.p_g[k] - (1 - p))});
        }
        CHECK(worst <= 1e-6);
    }
    // pi pulse
    SchemeSpec half = s;
    half.t_end = 1.0 / (2 * rabi);
    const Trajectory tr = propagate(Model::Schrodinger, half, {});
    CHECK(tr.p_i.back() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("propagate: field-free exponential decay") {
    const SchemeSpec s = dark(0.0, 0.5);
    DensityMatrix3 rho;
    rho.rho.setZero();
    rho.rho(1, 1) = 1.0;
    PropagateOptions o;
    o.n_samples = 501;
    const Trajectory tr = propagate(Model::Lindblad, s, rho, o);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k)
        worst = std::max(worst, std::abs(tr.p_i[k] - std::exp(-two_pi * 6.0 * tr.t[k])));
    CHECK(worst <= 1e-6);
    CHECK(tr.p_i[100] == doctest::Approx(0.0231).epsilon(1e-3));
    CHECK(tr.t[100] == doctest::Approx(0.1));
}

TEST_CASE("propagate: cascade decay from the Rydberg state") {
    SchemeSpec s = dark(0.0, 2.0);
    s.atom.gamma_ri = 0.5;
    DensityMatrix3 rho;
    rho.rho.setZero();
    rho.rho(2, 2) = 1.0;
    const Trajectory tr = propagate(Model::Lindblad, s, rho, {});
    const double a = two_pi * 6.0, b = two_pi * 0.5;
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const double t = tr.t[k];
        const double pr = std::exp(-b * t);
        const double pi_ = b / (a - b) * (std::exp(-b * t) - std::exp(-a * t));
        worst = std::max({worst, std::abs(tr.p_r[k] - pr), std::abs(tr.p_i[k] - pi_)});
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("propagate: coherence magnitudes decay at the radiative rates") {
    const SchemeSpec s = dark(0.0, 0.3);
    DensityMatrix3 rho;
    rho.rho.setConstant(1.0 / 3.0);
    PropagateOptions o;
    o.record_coherences = true;
    const Trajectory tr = propagate(Model::Lindblad, s, rho, o);
    const double gi = two_pi * 6.0, gr = two_pi * 3e-3;
    const double t = tr.t.back();
    const auto& c = tr.coherences.back();
    CHECK(c[0] == doctest::Approx(std::exp(-gi / 2 * t) / 3).epsilon(1e-6));
    CHECK(c[1] == doctest::Approx(std::exp(-(gi + gr) / 2 * t) / 3).epsilon(1e-6));
    CHECK(c[2] == doctest::Approx(std::exp(-gr / 2 * t) / 3).epsilon(1e-6));
}

TEST_CASE("propagate: effective model resonant two-photon Rabi oscillation") {
    SchemeSpec s = dark(0.0, 1.0);
    s.pump.shape = s.stokes.shape = EnvelopeShape::ConstantCW;
    s.pump.peak_rabi = s.stokes.peak_rabi = 60.0;
    s.case_tag = CaseTag::PumpChirpedStokesCW;
    const Trajectory tr = propagate(Model::Effective, s, {});
    const double w = two_pi * 60.0 * 60.0 / (2 * 1500.0);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k)
        worst = std::max(worst, std::abs(tr.p_r[k] - std::pow(std::sin(w * tr.t[k] / 2), 2)));
    CHECK(worst <= 1e-6);
    for (double p : tr.p_i) CHECK(p == 0.0);
}

TEST_CASE("propagate: trajectory invariants") {
    PropagateOptions o;
    o.n_samples = 300;
    o.rel_tol = 1e-8;
    const Trajectory tr = propagate(Model::Lindblad, preset_case2(), o);
    REQUIRE(tr.size() == 300);
    CHECK(tr.t.front() == -5.0);
    CHECK(tr.t.back() == 5.0);
    for (std::size_t k = 1; k < tr.size(); ++k) CHECK(tr.t[k] > tr.t[k - 1]);
    for (std::size_t k = 0; k < tr.size(); ++k) {
        for (double p : {tr.p_g[k], tr.p_i[k], tr.p_r[k]}) {
            CHECK(p >= -1e-8);
            CHECK(p <= 1 + 1e-8);
        }
        CHECK(std::abs(tr.p_g[k] + tr.p_i[k] + tr.p_r[k] - 1.0) <= 1e-6);
    }
    CHECK(tr.invariants.max_hermiticity <= 1e-9);
    CHECK(tr.invariants.min_eigenvalue >= -1e-6);
    CHECK(tr.stats.accepted > 0);
    CHECK(tr.stats.error_estimate > 0.0);
    const auto* rho = std::get_if<DensityMatrix3>(&tr.final_state);
    REQUIRE(rho != nullptr);
    CHECK(rho->rho(2, 2).real() == doctest::Approx(tr.p_r.back()).epsilon(1e-12));
}

TEST_CASE("propagate: Lindblad without decay reproduces Schrodinger") {
    SchemeSpec s = no_decay(preset_case2());
    PropagateOptions o;
    o.n_samples = 200;
    const Trajectory a = propagate(Model::Schrodinger, s, o);
    const Trajectory b = propagate(Model::Lindblad, s, o);
    CHECK(max_abs(a.p_g, b.p_g) <= 1e-6);
    CHECK(max_abs(a.p_i, b.p_i) <= 1e-6);
    CHECK(max_abs(a.p_r, b.p_r) <= 1e-6);
}

TEST_CASE("propagate: effective model agrees with the full ladder on case 1") {
    const SchemeSpec s = preset_case1(100.0);
    PropagateOptions o;
    o.n_samples = 2;
    const double full = propagate(Model::Schrodinger, s, o).p_r.back();
    const double eff = propagate(Model::Effective, s, o).p_r.back();
    CHECK(std::abs(full - eff) <= 0.02);
}

TEST_CASE("propagate: halving rel_tol moves populations less than the error estimate") {
    std::mt19937_64 rng(20261017);
    std::uniform_real_distribution<double> peak(10.0, 80.0), width(0.3, 1.0), chirp(-6.0, 6.0),
        big(150.0, 400.0), sign(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        SchemeSpec s = preset_case1();
        s.pump.peak_rabi = peak(rng);
        s.stokes.peak_rabi = peak(rng);
        s.pump.width = width(rng);
        s.stokes.width = width(rng);
        s.pump.chirp_rate = chirp(rng);
        s.stokes.chirp_rate = chirp(rng);
        s.atom.delta0 = big(rng) * (sign(rng) < 0 ? -1.0 : 1.0);
        const double w = std::max(s.pump.width, s.stokes.width);
        s.t_start = -5 * w;
        s.t_end = 5 * w;
        PropagateOptions o;
        o.n_samples = 2;
        o.rel_tol = 1e-7;
        o.abs_tol = 1e-10;
        // Strong chirps over long windows accumulate norm drift past the
        // default guard; only convergence is under test here.
        o.invariant_factor = 1e12;
        const Trajectory coarse = propagate(Model::Schrodinger, s, o);
        o.rel_tol /= 2;
        const Trajectory fine = propagate(Model::Schrodinger, s, o);
        const double diff = std::max({std::abs(coarse.p_g.back() - fine.p_g.back()),
                                      std::abs(coarse.p_i.back() - fine.p_i.back()),
                                      std::abs(coarse.p_r.back() - fine.p_r.back())});
        CAPTURE(k);
        CHECK(diff < coarse.stats.error_estimate);
    }
}

TEST_CASE("propagate: rejects bad options and mismatched initial states") {
    const SchemeSpec s = preset_case2();
    PropagateOptions o;
    o.rel_tol = 0.0;
    CHECK_THROWS_AS(propagate(Model::Schrodinger, s, o), DomainError);
    o.rel_tol = 2e-3;
    CHECK_THROWS_AS(propagate(Model::Schrodinger, s, o), DomainError);
    o = PropagateOptions{};
    o.n_samples = 1;
    CHECK_THROWS_AS(propagate(Model::Schrodinger, s, o), DomainError);
    CHECK_THROWS_AS(propagate(Model::Lindblad, s, AmplitudeState{}, PropagateOptions{}), DomainError);
    CHECK_THROWS_AS(propagate(Model::Schrodinger, s, AmplitudeState{cplx(2.0), {}, {}}, PropagateOptions{}),
                    DomainError);
    DensityMatrix3 bad;
    bad.rho(0, 1) = 0.5;
    CHECK_THROWS_AS(propagate(Model::Lindblad, s, bad, PropagateOptions{}), DomainError);
}

TEST_CASE("propagate: effective model refuses a small one-photon detuning") {
    SchemeSpec s = preset_case1(100.0);
    s.atom.delta0 = 500.0;
    CHECK_THROWS_AS(propagate(Model::Effective, s, {}), DomainError);
    CHECK_THROWS_AS(check_elimination_validity(s), DomainError);
    CHECK_NOTHROW(check_elimination_validity(preset_case1(100.0)));
}

TEST_CASE("propagate: numerical failures carry a time") {
    SchemeSpec s = preset_case2();
    s.pump.peak_rabi = 1e300;
    try {
        propagate(Model::Schrodinger, s, {});
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.time() >= s.t_start);
        CHECK(e.time() <= s.t_end);
    }
    PropagateOptions o;
    o.invariant_factor = 1e-9;
    CHECK_THROWS_AS(propagate(Model::Lindblad, preset_case2(), o), NumericalError);
}

TEST_CASE("density matrix helpers") {
    const DensityMatrix3 g;
    CHECK(g.trace() == 1.0);
    CHECK(g.hermiticity_error() == 0.0);
    CHECK(g.min_eigenvalue() == doctest::Approx(0.0));
    const DensityMatrix3 p = DensityMatrix3::pure({cplx(0.6), cplx(0, 0.8), cplx(0)});
    CHECK(p.trace() == doctest::Approx(1.0));
    CHECK(std::abs(p.rho(0, 1) - cplx(0.6) * std::conj(cplx(0, 0.8))) <= 1e-15);
}

TEST_CASE("model names round-trip") {
    for (Model m : {Model::Schrodinger, Model::Lindblad, Model::Effective})
        CHECK(parse_model(to_string(m)) == m);
    CHECK_THROWS_AS(parse_model("bloch"), DomainError);
}
