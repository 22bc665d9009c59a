#include <doctest.h>

#include <cmath>
#include <vector>

#include "arpsim/errors.hpp"
#include "arpsim/ode.hpp"

using namespace arpsim;
using ode::State;

TEST_CASE("integrate: exponential growth") {
    ode::Options opt;
    ode::Stats st;
    auto rhs = [](double, const State<1>& y, State<1>& dy) { dy[0] = y[0]; };
    const State<1> y = ode::integrate<1>(rhs, State<1>{1.0}, 0.0, 2.0, opt, st);
    CHECK(std::abs(y[0] - std::exp(2.0)) <= 1e-8 * std::exp(2.0));
    CHECK(st.accepted > 0);
    CHECK(st.rhs_evals >= 6 * st.accepted);
}

TEST_CASE("integrate: harmonic oscillator over many periods") {
    ode::Options opt;
    ode::Stats st;
    const double w = 50.0;
    auto rhs = [w](double, const State<2>& y, State<2>& dy) {
        dy[0] = y[1];
        dy[1] = -w * w * y[0];
    };
    const double t1 = 3.0;
    const State<2> y = ode::integrate<2>(rhs, State<2>{1.0, 0.0}, 0.0, t1, opt, st);
    CHECK(std::abs(y[0] - std::cos(w * t1)) <= 1e-6);
    CHECK(std::abs(y[1] + w * std::sin(w * t1)) <= 1e-6 * w);
}

TEST_CASE("integrate: dense output tracks the solution inside steps") {
    ode::Options opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-13;
    ode::Stats st;
    auto rhs = [](double t, const State<1>&, State<1>& dy) { dy[0] = std::cos(3.0 * t); };
    double worst = 0.0;
    double last_t = 0.0;
    bool monotone = true;
    ode::integrate<1>(rhs, State<1>{0.0}, 0.0, 4.0, opt, st,
                      [&](const ode::DenseStep<1>& d, const State<1>&) {
                          monotone = monotone && d.t0 >= last_t && d.h > 0.0;
                          last_t = d.t0 + d.h;
                          for (double s : {0.1, 0.37, 0.5, 0.81}) {
                              const double t = d.t0 + s * d.h;
                              worst = std::max(worst, std::abs(d(t)[0] - std::sin(3.0 * t) / 3.0));
                          }
                      });
    CHECK(monotone);
    CHECK(last_t == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(worst <= 1e-8);
}

TEST_CASE("integrate: ends exactly on t1") {
    ode::Options opt;
    ode::Stats st;
    double end = 0.0;
    auto rhs = [](double, const State<1>&, State<1>& dy) { dy[0] = 1.0; };
    const State<1> y = ode::integrate<1>(rhs, State<1>{0.0}, -1.0, 0.3, opt, st,
                                         [&](const ode::DenseStep<1>& d, const State<1>&) {
                                             end = d.t0 + d.h;
                                         });
    CHECK(y[0] == doctest::Approx(1.3).epsilon(1e-14));
    CHECK(end == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("integrate: blow-up is reported with its time") {
    ode::Options opt;
    ode::Stats st;
    auto rhs = [](double, const State<1>& y, State<1>& dy) { dy[0] = y[0] * y[0]; };
    try {
        ode::integrate<1>(rhs, State<1>{1.0}, 0.0, 2.0, opt, st);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.time() == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("integrate: step budget") {
    ode::Options opt;
    opt.max_steps = 10;
    ode::Stats st;
    auto rhs = [](double, const State<2>& y, State<2>& dy) {
        dy[0] = 1e3 * y[1];
        dy[1] = -1e3 * y[0];
    };
    CHECK_THROWS_AS(ode::integrate<2>(rhs, State<2>{1.0, 0.0}, 0.0, 10.0, opt, st), NumericalError);
}

TEST_CASE("integrate: bad arguments") {
    ode::Options opt;
    ode::Stats st;
    auto rhs = [](double, const State<1>&, State<1>& dy) { dy[0] = 0.0; };
    CHECK_THROWS_AS(ode::integrate<1>(rhs, State<1>{0.0}, 1.0, 1.0, opt, st), DomainError);
    opt.rel_tol = 0.0;
    CHECK_THROWS_AS(ode::integrate<1>(rhs, State<1>{0.0}, 0.0, 1.0, opt, st), DomainError);
}

TEST_CASE("integrate: tighter tolerance reduces the error") {
    auto rhs = [](double t, const State<1>& y, State<1>& dy) { dy[0] = -2.0 * t * y[0]; };
    double prev = 1.0;
    for (double tol : {1e-5, 1e-7, 1e-9, 1e-11}) {
        ode::Options opt;
        opt.rel_tol = tol;
        opt.abs_tol = tol * 1e-3;
        ode::Stats st;
        const State<1> y = ode::integrate<1>(rhs, State<1>{1.0}, 0.0, 3.0, opt, st);
        const double err = std::abs(y[0] - std::exp(-9.0));
        CHECK(err <= prev);
        prev = std::max(err, 1e-16);
    }
}
