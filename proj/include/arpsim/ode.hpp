#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta integrator with PI step-size
// control and a fourth-order continuous extension for dense output.
//
// The state is a fixed-size array of doubles; complex quantities are packed
// as interleaved (re, im) pairs by the caller.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

#include <fmt/format.h>

#include "arpsim/errors.hpp"

namespace arpsim::ode {

struct Options {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0 selects a step automatically
    double max_step = 0.0;      // 0 means unbounded
    long max_steps = 50'000'000;
};

struct Stats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
    // Sum over accepted steps of the max-norm local error estimate. Serves as
    // a (pessimistic) estimate of the global error of the propagated solution.
    double error_estimate = 0.0;
};

template <std::size_t N>
using State = std::array<double, N>;

namespace detail {

// Butcher tableau.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// Difference between the 5th and embedded 4th order weights.
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense output.
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

// PI controller constants (Hairer & Wanner's DOPRI5 defaults).
inline constexpr double safety = 0.9;
inline constexpr double beta = 0.04;
inline constexpr double expo1 = 0.2 - beta * 0.75;
inline constexpr double fac_min = 0.2;   // step may shrink to at most 1/5 ...
inline constexpr double fac_max = 10.0;  // ... and grow to at most 10x

}  // namespace detail

// Continuous extension over the last accepted step [t0, t0 + h].
template <std::size_t N>
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<State<N>, 5> r{};

    State<N> operator()(double t) const {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        State<N> y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
        return y;
    }
};

// Integrates dy/dt = rhs(t, y) from t0 to t1 (t1 > t0). `rhs` has signature
// void(double t, const State<N>& y, State<N>& dydt). `observer` is called as
// observer(const DenseStep<N>&, const State<N>& y_new) after every accepted
// step and may interpolate anywhere inside the step. Returns y(t1).
//
// Throws NumericalError if the step size underflows or the step budget is
// exhausted; the error carries the time at which it happened.
template <std::size_t N, class Rhs, class Observer>
State<N> integrate(Rhs&& rhs, State<N> y, double t0, double t1, const Options& opt,
                   Stats& stats, Observer&& observer) {
    using namespace detail;
    if (!(t1 > t0)) throw DomainError("integrate: need t1 > t0");
    if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0))
        throw DomainError("integrate: tolerances must be positive");

    const double span = t1 - t0;
    const double max_step = opt.max_step > 0.0 ? opt.max_step : span;

    auto error_norm = [&](const State<N>& err, const State<N>& a, const State<N>& b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
            const double q = err[i] / sc;
            sum += q * q;
        }
        return std::sqrt(sum / static_cast<double>(N));
    };

    State<N> k1, k2, k3, k4, k5, k6, k7, tmp, y_new, err;
    rhs(t0, y, k1);
    ++stats.rhs_evals;

    double h = opt.initial_step;
    if (!(h > 0.0)) {
        // Initial guess following Hairer, Norsett & Wanner (II.4).
        const State<N> unit{};
        const double d0 = error_norm(y, unit, y);
        const double d1n = error_norm(k1, unit, y);
        double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h0 = std::min(h0, max_step);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h0 * k1[i];
        rhs(t0 + h0, tmp, k2);
        ++stats.rhs_evals;
        for (std::size_t i = 0; i < N; ++i) err[i] = k2[i] - k1[i];
        const double d2 = error_norm(err, unit, y) / h0;
        const double h1 = std::max(d1n, d2) <= 1e-15
                              ? std::max(1e-6, h0 * 1e-3)
                              : std::pow(0.01 / std::max(d1n, d2), 0.2);
        h = std::min({100.0 * h0, h1, max_step});
    }

    double t = t0;
    double err_old = 1e-4;
    bool last_rejected = false;
    DenseStep<N> dense;

    while (t < t1) {
        if (stats.accepted + stats.rejected >= opt.max_steps)
            throw NumericalError(fmt::format("step budget exhausted at t = {:.9g}", t), t);
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
            throw NumericalError(fmt::format("step size underflow at t = {:.9g}", t), t);

        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, tmp, k2);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, tmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, tmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, tmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                 a65 * k5[i]);
        rhs(t + h, tmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            y_new[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                                   a76 * k6[i]);
        rhs(t + h, y_new, k7);
        stats.rhs_evals += 6;

        for (std::size_t i = 0; i < N; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
        const double en = error_norm(err, y, y_new);
        if (!std::isfinite(en))
            throw NumericalError(fmt::format("non-finite state near t = {:.9g}", t), t);

        if (en <= 1.0) {
            double fac = std::pow(en, expo1) / std::pow(err_old, beta);
            fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
            double h_new = h / fac;
            if (last_rejected) h_new = std::min(h_new, h);
            err_old = std::max(en, 1e-4);

            dense.t0 = t;
            dense.h = h;
            for (std::size_t i = 0; i < N; ++i) {
                const double dy = y_new[i] - y[i];
                const double bspl = h * k1[i] - dy;
                dense.r[0][i] = y[i];
                dense.r[1][i] = dy;
                dense.r[2][i] = bspl;
                dense.r[3][i] = dy - h * k7[i] - bspl;
                dense.r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                     d6 * k6[i] + d7 * k7[i]);
            }
            double err_max = 0.0;
            for (std::size_t i = 0; i < N; ++i) err_max = std::max(err_max, std::abs(err[i]));
            stats.error_estimate += err_max;
            ++stats.accepted;

            t = last ? t1 : t + h;
            y = y_new;
            k1 = k7;  // first-same-as-last
            observer(dense, y);

            h = std::min(h_new, max_step);
            last_rejected = false;
        } else {
            const double fac = std::min(1.0 / fac_min, std::pow(en, expo1) / safety);
            h = h / fac;
            ++stats.rejected;
            last_rejected = true;
        }
    }
    return y;
}

template <std::size_t N, class Rhs>
State<N> integrate(Rhs&& rhs, State<N> y, double t0, double t1, const Options& opt, Stats& stats) {
    return integrate<N>(std::forward<Rhs>(rhs), y, t0, t1, opt, stats,
                        [](const DenseStep<N>&, const State<N>&) {});
}

}  // namespace arpsim::ode
