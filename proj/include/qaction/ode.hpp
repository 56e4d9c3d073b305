// SPDX-License-Identifier: Apache-2.0
//
// Adaptive Dormand-Prince 5(4) integrator for first-order systems y' = f(s, y).

#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "qaction/errors.hpp"

namespace qaction::ode {

struct Options {
    double rtol = 1e-11;
    double atol = 1e-12;
    double initial_step = 1e-3;
    double min_step = 1e-14;
    long max_steps = 1000000;
};

struct Stats {
    long accepted = 0;
    long rejected = 0;
    /// Step size to start the next call with.
    double next_step = 0.0;
};

/// Integrate from s0 to s1, overwriting y. Throws NumericalError when the
/// step size underflows or the step budget is exhausted.
template <class Rhs>
void integrate(const Rhs& rhs, Eigen::VectorXd& y, double s0, double s1, const Options& opt,
               Stats& stats)
{
    // Dormand-Prince tableau.
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double span = s1 - s0;
    if (span == 0.0) return;
    const double dir = span > 0 ? 1.0 : -1.0;
    double h = stats.next_step > 0.0 ? stats.next_step : opt.initial_step;
    h = std::min(h, std::abs(span));
    double s = s0;
    Eigen::VectorXd k1 = rhs(s, y);
    long steps = 0;
    while (dir * (s1 - s) > 0.0) {
        if (++steps > opt.max_steps) {
            throw NumericalError("ODE integration exceeded the step budget");
        }
        bool last = false;
        if (h >= std::abs(s1 - s)) {
            h = std::abs(s1 - s);
            last = true;
        }
        const double hs = dir * h;
        const Eigen::VectorXd k2 = rhs(s + c2 * hs, y + hs * (a21 * k1));
        const Eigen::VectorXd k3 = rhs(s + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
        const Eigen::VectorXd k4 = rhs(s + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::VectorXd k5 =
            rhs(s + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::VectorXd k6 =
            rhs(s + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::VectorXd y_new =
            y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Eigen::VectorXd k7 = rhs(s + hs, y_new);
        const Eigen::VectorXd err =
            hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err_norm = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(y(i)), std::abs(y_new(i)));
            err_norm = std::max(err_norm, std::abs(err(i)) / sc);
        }
        if (!std::isfinite(err_norm)) {
            throw NumericalError("ODE right-hand side produced non-finite values");
        }
        if (err_norm <= 1.0) {
            s = last ? s1 : s + hs;
            y = y_new;
            k1 = k7;
            ++stats.accepted;
            const double factor =
                err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
            if (!last) h *= factor;
            else stats.next_step = h * factor;
        } else {
            ++stats.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
            if (h < opt.min_step) {
                std::ostringstream msg;
                msg << "ODE step size underflow at s = " << s;
                throw NumericalError(msg.str());
            }
        }
    }
    if (stats.next_step <= 0.0) stats.next_step = h;
}

} // namespace qaction::ode
