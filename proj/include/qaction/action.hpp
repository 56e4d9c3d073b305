// SPDX-License-Identifier: Apache-2.0
//
// Quantities evaluated on a discretized path: the action, the Euler-Lagrange
// residual field and the accumulated resources.

#pragma once

#include <cmath>
#include <vector>

#include "qaction/discretization.hpp"
#include "qaction/lagrangian.hpp"

namespace qaction {

/// Path velocities lambda'(s_k) from fourth-order differences.
inline RealMatrix path_velocities(const Path& path)
{
    return discretization::derivative(path.nodes(), path.spacing());
}

/// L(s_k) at every node.
inline Eigen::VectorXd node_lagrangians(const ActionProblem& problem, const Path& path)
{
    const RealMatrix vel = path_velocities(path);
    Eigen::VectorXd out(path.intervals() + 1);
    for (int k = 0; k <= path.intervals(); ++k) {
        out(k) = lagrangian(problem, path.node(k), vel.row(k).transpose());
    }
    return out;
}

/// Composite Simpson quadrature of L along the path.
inline double action(const ActionProblem& problem, const Path& path)
{
    const Eigen::VectorXd weights =
        discretization::simpson_weights(path.intervals(), path.spacing());
    return weights.dot(node_lagrangians(problem, path));
}

struct ELResidual {
    /// Row k-1 holds d/ds dL/dlambda'_mu - dL/dlambda_mu at interior node k.
    RealMatrix residual;
    /// Nodes where the residual is undefined (K1 near rest points).
    std::vector<bool> undefined;
    /// Max-norm over the defined nodes.
    double max_abs = 0.0;
};

/// Euler-Lagrange residual from central differences of L in (lambda, lambda')
/// and fourth-order differences along the grid.
inline ELResidual el_residual(const ActionProblem& problem, const Path& path)
{
    const int n = path.intervals();
    const auto m = path.num_params();
    const RealMatrix vel = path_velocities(path);

    RealMatrix momentum(n + 1, m);
    RealMatrix force(n + 1, m);
    std::vector<bool> at_rest(static_cast<std::size_t>(n + 1), false);
    for (int k = 0; k <= n; ++k) {
        const ParamVector lam = path.node(k);
        const ParamVector v = vel.row(k).transpose();
        if (problem.kinetic == KineticTerm::K1 && v.norm() < kRestSpeed) {
            at_rest[static_cast<std::size_t>(k)] = true;
            momentum.row(k).setZero();
            force.row(k).setZero();
            continue;
        }
        for (Eigen::Index mu = 0; mu < m; ++mu) {
            const double hv = 1e-5 * std::max(1.0, std::abs(v(mu)));
            ParamVector vp = v, vm = v;
            vp(mu) += hv;
            vm(mu) -= hv;
            momentum(k, mu) = (lagrangian(problem, lam, vp) - lagrangian(problem, lam, vm)) /
                              (vp(mu) - vm(mu));
            if (k == 0 || k == n) continue;
            const double hl = 1e-5 * std::max(1.0, std::abs(lam(mu)));
            ParamVector lp = lam, lm = lam;
            lp(mu) += hl;
            lm(mu) -= hl;
            force(k, mu) =
                (lagrangian(problem, lp, v) - lagrangian(problem, lm, v)) / (lp(mu) - lm(mu));
        }
    }
    const RealMatrix dmomentum = discretization::derivative(momentum, path.spacing());

    ELResidual out;
    out.residual = RealMatrix::Zero(n - 1, m);
    out.undefined.assign(static_cast<std::size_t>(n - 1), false);
    for (int k = 1; k < n; ++k) {
        bool undefined = false;
        for (int j = std::max(0, k - 2); j <= std::min(n, k + 2); ++j) {
            undefined = undefined || at_rest[static_cast<std::size_t>(j)];
        }
        out.undefined[static_cast<std::size_t>(k - 1)] = undefined;
        if (undefined) continue;
        out.residual.row(k - 1) = dmomentum.row(k) - force.row(k);
        out.max_abs = std::max(out.max_abs, out.residual.row(k - 1).cwiseAbs().maxCoeff());
    }
    return out;
}

/// E, F and Q of the state at one parameter point.
///
/// Missing potential settings fall back to subsystem {0} for the bipartition and to
/// the computational basis for dephasing. A single-factor system has no
/// bipartition; its state is pure as a whole, so E = F = 0.
inline Accumulated resource_point(const ActionProblem& problem, const ParamVector& lambda)
{
    const ComplexMatrix rho = density(evolve(problem.family, lambda));
    Accumulated out;
    std::optional<Bipartition> split = problem.potential.bipartition;
    if (!split && problem.family.factorization().size() > 1) {
        split.emplace(problem.family.factorization(), std::vector<std::size_t>{0});
    }
    if (split) {
        out.entanglement = entanglement(rho, *split);
        out.antiflatness = antiflatness(rho, *split);
    }
    out.coherence =
        problem.potential.dephasing_basis
            ? coherence(rho, *problem.potential.dephasing_basis)
            : coherence(rho, ProjectorBasis::computational(
                                 static_cast<std::size_t>(problem.family.dim())));
    return out;
}

/// Per-node resource values; row k holds (E, F, Q) at s_k.
inline RealMatrix resource_profile(const ActionProblem& problem, const Path& path)
{
    RealMatrix out(path.intervals() + 1, 3);
    for (int k = 0; k <= path.intervals(); ++k) {
        const Accumulated a = resource_point(problem, path.node(k));
        out.row(k) << a.entanglement, a.antiflatness, a.coherence;
    }
    return out;
}

/// Simpson quadrature of E, F and Q along the path.
inline Accumulated accumulate(const ActionProblem& problem, const Path& path)
{
    const Eigen::VectorXd w = discretization::simpson_weights(path.intervals(), path.spacing());
    const Eigen::VectorXd totals = resource_profile(problem, path).transpose() * w;
    return {totals(0), totals(1), totals(2)};
}

} // namespace qaction
