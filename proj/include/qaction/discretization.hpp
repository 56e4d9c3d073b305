// SPDX-License-Identifier: Apache-2.0
//
// Grid stencils and quadrature rules on the uniform s-grid.

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "qaction/errors.hpp"

namespace qaction::discretization {

/// Fourth-order first derivative of each column of `values` sampled at
/// spacing h. Central 5-point stencil inside, off-centred 5-point near ends.
inline Eigen::MatrixXd derivative(const Eigen::MatrixXd& values, double h)
{
    const auto n = values.rows();
    if (n < 5) {
        throw SolverError("fourth-order derivative stencil needs at least 5 samples");
    }
    Eigen::MatrixXd out(n, values.cols());
    const double c = 1.0 / (12.0 * h);
    const auto f = [&](Eigen::Index k) { return values.row(k); };
    out.row(0) = c * (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4));
    out.row(1) = c * (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4));
    for (Eigen::Index k = 2; k < n - 2; ++k) {
        out.row(k) = c * (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2));
    }
    const auto e = n - 1;
    out.row(e - 1) = -c * (-3.0 * f(e) - 10.0 * f(e - 1) + 18.0 * f(e - 2) - 6.0 * f(e - 3) +
                           f(e - 4));
    out.row(e) = -c * (-25.0 * f(e) + 48.0 * f(e - 1) - 36.0 * f(e - 2) + 16.0 * f(e - 3) -
                       3.0 * f(e - 4));
    return out;
}

/// Composite Simpson weights for N intervals of width h. Odd N closes with
/// the 3/8 rule on the last three intervals.
inline Eigen::VectorXd simpson_weights(int intervals, double h)
{
    if (intervals < 2) {
        throw SolverError("Simpson quadrature needs at least two intervals");
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(intervals + 1);
    const int simpson_end = (intervals % 2 == 0) ? intervals : intervals - 3;
    for (int k = 0; k + 2 <= simpson_end; k += 2) {
        w(k) += h / 3.0;
        w(k + 1) += 4.0 * h / 3.0;
        w(k + 2) += h / 3.0;
    }
    if (simpson_end != intervals) {
        const int k = simpson_end;
        w(k) += 3.0 * h / 8.0;
        w(k + 1) += 9.0 * h / 8.0;
        w(k + 2) += 9.0 * h / 8.0;
        w(k + 3) += 3.0 * h / 8.0;
    }
    return w;
}

struct QuadratureRule {
    std::vector<double> points;  ///< on [0, 1]
    std::vector<double> weights; ///< sum to 1
};

/// n-point Gauss-Legendre rule mapped to [0, 1].
inline QuadratureRule gauss_legendre(int n)
{
    QuadratureRule rule;
    rule.points.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.points[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
        rule.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

/// Lagrange element of degree p on p+1 equispaced local nodes over [0, 1].
struct LagrangeElement {
    int first_node = 0;
    int degree = 0;

    /// Basis values and local derivatives d/dxi at xi.
    void basis(double xi, Eigen::VectorXd& value, Eigen::VectorXd& deriv) const
    {
        const int n = degree + 1;
        value.resize(n);
        deriv.resize(n);
        for (int a = 0; a < n; ++a) {
            const double xa = static_cast<double>(a) / degree;
            double v = 1.0;
            double d = 0.0;
            for (int b = 0; b < n; ++b) {
                if (b == a) continue;
                const double xb = static_cast<double>(b) / degree;
                double term = 1.0 / (xa - xb);
                for (int c = 0; c < n; ++c) {
                    if (c == a || c == b) continue;
                    const double xc = static_cast<double>(c) / degree;
                    term *= (xi - xc) / (xa - xc);
                }
                d += term;
                v *= (xi - xb) / (xa - xb);
            }
            value(a) = v;
            deriv(a) = d;
        }
    }
};

/// Cover N grid intervals with elements of degree 4, finishing with lower
/// degree elements (2 or 3) when N is not a multiple of 4.
inline std::vector<LagrangeElement> partition_elements(int intervals)
{
    if (intervals < 2) {
        throw SolverError("element partition needs at least two intervals");
    }
    std::vector<int> tail;
    int body = intervals;
    switch (intervals % 4) {
    case 1:
        if (intervals < 5) throw SolverError("cannot partition a single interval");
        tail = {3, 2};
        body -= 5;
        break;
    case 2:
        tail = {2};
        body -= 2;
        break;
    case 3:
        tail = {3};
        body -= 3;
        break;
    default: break;
    }
    std::vector<LagrangeElement> elements;
    int node = 0;
    for (int k = 0; k < body / 4; ++k) {
        elements.push_back({node, 4});
        node += 4;
    }
    for (int p : tail) {
        elements.push_back({node, p});
        node += p;
    }
    return elements;
}

} // namespace qaction::discretization
