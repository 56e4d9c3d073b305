// SPDX-License-Identifier: Apache-2.0
//
// L(lambda, lambda') = K - V with K the Fubini-Study speed (K1) or its
// square (K2), and local first/second derivatives of L for the solvers.

#pragma once

#include <cmath>
#include <vector>

#include "qaction/problem.hpp"

namespace qaction {

inline double lagrangian(const ActionProblem& problem, const ParamVector& lambda,
                         const ParamVector& lambda_prime)
{
    const StateJet jet = state_jet(problem.family, lambda, lambda_prime);
    const double kinetic =
        problem.kinetic == KineticTerm::K1 ? fs_speed(jet) : fs_speed_squared(jet);
    return kinetic - potential_value(jet, problem.potential);
}

/// Metric and potential at one parameter point; together they determine
/// L(lambda, v) = kinetic(v^T g v) - V for every velocity v.
struct PointData {
    RealMatrix g;
    double potential = 0.0;
};

inline PointData point_data(const ActionProblem& problem, const ParamVector& lambda)
{
    const StateJet jet = state_jet(problem.family, lambda);
    return {qgt(jet).g, potential_value(jet, problem.potential)};
}

/// Value, gradient and (optionally) Hessian of L in the variables (lambda, v),
/// ordered lambda first.
struct LagrangianDerivatives {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
    /// Squared Fubini-Study speed v^T g v at the point.
    double speed_squared = 0.0;
};

struct DerivativeSteps {
    /// Relative step for first derivatives in lambda.
    double first = 1e-5;
    /// Relative step for second derivatives in lambda.
    double second = 1e-4;
};

/// Speed below which K1 is treated as non-differentiable.
inline constexpr double kRestSpeed = 1e-8;

namespace detail {

struct KineticJet {
    double value, d1, d2;
};

inline KineticJet kinetic_jet(KineticTerm kinetic, double q)
{
    if (kinetic == KineticTerm::K2) return {q, 1.0, 0.0};
    const double r = std::sqrt(q);
    return {r, 0.5 / r, -0.25 / (q * r)};
}

} // namespace detail

/// Derivatives through point data: lambda-derivatives of g and V by central
/// differences, velocity derivatives in closed form.
inline LagrangianDerivatives lagrangian_derivatives(const ActionProblem& problem,
                                                    const ParamVector& lambda,
                                                    const ParamVector& velocity,
                                                    bool with_hessian,
                                                    DerivativeSteps steps = {})
{
    const auto m = lambda.size();
    const PointData center = point_data(problem, lambda);

    std::vector<RealMatrix> dg(static_cast<std::size_t>(m));
    ParamVector dv(m);
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        const double h = steps.first * std::max(1.0, std::abs(lambda(mu)));
        ParamVector lp = lambda, lm = lambda;
        lp(mu) += h;
        lm(mu) -= h;
        const PointData p = point_data(problem, lp);
        const PointData n = point_data(problem, lm);
        const double width = lp(mu) - lm(mu);
        dg[static_cast<std::size_t>(mu)] = (p.g - n.g) / width;
        dv(mu) = (p.potential - n.potential) / width;
    }

    const RealMatrix& g = center.g;
    const double q = std::max(0.0, velocity.dot(g * velocity));
    LagrangianDerivatives out;
    out.speed_squared = q;
    if (problem.kinetic == KineticTerm::K1 && q < kRestSpeed * kRestSpeed) {
        throw SolverError(
            "K1 Lagrangian is not differentiable at a rest point (Fubini-Study speed below "
            "1e-8); use the K2 kinetic term for this problem");
    }
    const auto kin = detail::kinetic_jet(problem.kinetic, q);
    out.value = kin.value - center.potential;

    const Eigen::VectorXd q_v = 2.0 * g * velocity;
    Eigen::VectorXd q_l(m);
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        q_l(mu) = velocity.dot(dg[static_cast<std::size_t>(mu)] * velocity);
    }
    out.gradient.resize(2 * m);
    out.gradient.head(m) = kin.d1 * q_l - dv;
    out.gradient.tail(m) = kin.d1 * q_v;
    if (!with_hessian) return out;

    // Second lambda-derivatives of g and V.
    std::vector<RealMatrix> d2g(static_cast<std::size_t>(m * m));
    RealMatrix d2v(m, m);
    std::vector<double> h2(static_cast<std::size_t>(m));
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        h2[static_cast<std::size_t>(mu)] = steps.second * std::max(1.0, std::abs(lambda(mu)));
    }
    const auto shifted = [&](Eigen::Index a, double sa, Eigen::Index b, double sb) {
        ParamVector l = lambda;
        l(a) += sa * h2[static_cast<std::size_t>(a)];
        l(b) += sb * h2[static_cast<std::size_t>(b)];
        return point_data(problem, l);
    };
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        const double h = h2[static_cast<std::size_t>(mu)];
        ParamVector lp = lambda, lm = lambda;
        lp(mu) += h;
        lm(mu) -= h;
        const PointData p = point_data(problem, lp);
        const PointData n = point_data(problem, lm);
        d2g[static_cast<std::size_t>(mu * m + mu)] = (p.g - 2.0 * g + n.g) / (h * h);
        d2v(mu, mu) = (p.potential - 2.0 * center.potential + n.potential) / (h * h);
        for (Eigen::Index nu = 0; nu < mu; ++nu) {
            const double hn = h2[static_cast<std::size_t>(nu)];
            const PointData pp = shifted(mu, 1, nu, 1);
            const PointData pm = shifted(mu, 1, nu, -1);
            const PointData mp = shifted(mu, -1, nu, 1);
            const PointData mm = shifted(mu, -1, nu, -1);
            const double denom = 4.0 * h * hn;
            const RealMatrix mixed = (pp.g - pm.g - mp.g + mm.g) / denom;
            d2g[static_cast<std::size_t>(mu * m + nu)] = mixed;
            d2g[static_cast<std::size_t>(nu * m + mu)] = mixed;
            d2v(mu, nu) = d2v(nu, mu) =
                (pp.potential - pm.potential - mp.potential + mm.potential) / denom;
        }
    }

    out.hessian.setZero(2 * m, 2 * m);
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        for (Eigen::Index nu = 0; nu < m; ++nu) {
            const double q_ll =
                velocity.dot(d2g[static_cast<std::size_t>(mu * m + nu)] * velocity);
            out.hessian(mu, nu) = kin.d2 * q_l(mu) * q_l(nu) + kin.d1 * q_ll - d2v(mu, nu);
        }
        const Eigen::VectorXd q_vl = 2.0 * dg[static_cast<std::size_t>(mu)] * velocity;
        const Eigen::VectorXd cross = kin.d2 * q_l(mu) * q_v + kin.d1 * q_vl;
        out.hessian.block(mu, m, 1, m) = cross.transpose();
        out.hessian.block(m, mu, m, 1) = cross;
    }
    out.hessian.bottomRightCorner(m, m) = kin.d2 * q_v * q_v.transpose() + kin.d1 * 2.0 * g;
    return out;
}

} // namespace qaction
