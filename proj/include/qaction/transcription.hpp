// SPDX-License-Identifier: Apache-2.0
//
// Direct transcription: minimize the action over the interior grid nodes.
//
// The path between nodes is the piecewise polynomial interpolant on Lagrange
// elements (degree 4 where the grid allows) and the action is integrated with
// Gauss-Legendre quadrature on each element. This keeps the discrete
// Euler-Lagrange equations consistent with the continuous ones; node-based
// Simpson weights combined with finite-difference velocities do not.
// The minimization is a damped Newton iteration on the exact Hessian of the
// discrete action, assembled from per-point second derivatives of L.
//
// K1 without a potential is the length functional. It is invariant under
// reparametrization, so its Hessian is singular along the path and Newton
// lets the node spacing drift until the speed vanishes somewhere. Its
// minimizers are exactly the constant-speed minimizers of the energy
// int g(v, v) ds, so that case minimizes the K2 energy instead and reports
// the K1 action of the result.

#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include <Eigen/Sparse>

#include "qaction/action.hpp"

namespace qaction {

struct TranscriptionOptions {
    int intervals = 400;
    int max_iterations = 100000;
    double gradient_tolerance = 1e-8;
    double relative_action_tolerance = 1e-12;
    DerivativeSteps steps{};
};

namespace detail {

/// Discrete action on Lagrange elements, as a function of interior nodes.
class ElementAction {
public:
    ElementAction(const ActionProblem& problem, int intervals, DerivativeSteps steps)
        : problem_(problem), intervals_(intervals), m_(static_cast<Eigen::Index>(problem.num_params())),
          steps_(steps), elements_(discretization::partition_elements(intervals))
    {
        const double h = 1.0 / intervals;
        for (const auto& el : elements_) {
            const auto rule = discretization::gauss_legendre(el.degree + 2);
            ElementRule er;
            er.element = el;
            er.width = el.degree * h;
            for (std::size_t q = 0; q < rule.points.size(); ++q) {
                Eigen::VectorXd val, der;
                el.basis(rule.points[q], val, der);
                er.values.push_back(val);
                er.derivs.push_back(der / er.width);
                er.weights.push_back(rule.weights[q] * er.width);
            }
            rules_.push_back(std::move(er));
        }
    }

    Eigen::Index num_unknowns() const { return (intervals_ - 1) * m_; }

    RealMatrix nodes_from(const Eigen::VectorXd& x) const
    {
        RealMatrix nodes(intervals_ + 1, m_);
        nodes.row(0) = problem_.lambda_a.transpose();
        nodes.row(intervals_) = problem_.lambda_b.transpose();
        for (int k = 1; k < intervals_; ++k) {
            nodes.row(k) = x.segment((k - 1) * m_, m_).transpose();
        }
        return nodes;
    }

    Eigen::VectorXd unknowns_from(const RealMatrix& nodes) const
    {
        Eigen::VectorXd x(num_unknowns());
        for (int k = 1; k < intervals_; ++k) {
            x.segment((k - 1) * m_, m_) = nodes.row(k).transpose();
        }
        return x;
    }

    double value(const Eigen::VectorXd& x) const
    {
        const RealMatrix nodes = nodes_from(x);
        double total = 0.0;
        for (const auto& er : rules_) {
            const auto local = nodes.middleRows(er.element.first_node, er.element.degree + 1);
            for (std::size_t q = 0; q < er.weights.size(); ++q) {
                const ParamVector lam = local.transpose() * er.values[q];
                const ParamVector vel = local.transpose() * er.derivs[q];
                const PointData pd = point_data(problem_, lam);
                const double speed2 = std::max(0.0, vel.dot(pd.g * vel));
                const double kin =
                    problem_.kinetic == KineticTerm::K1 ? std::sqrt(speed2) : speed2;
                total += er.weights[q] * (kin - pd.potential);
            }
        }
        return total;
    }

    /// Value, gradient and sparse Hessian of the discrete action.
    double assemble(const Eigen::VectorXd& x, Eigen::VectorXd& gradient,
                    Eigen::SparseMatrix<double>& hessian) const
    {
        const RealMatrix nodes = nodes_from(x);
        const Eigen::Index n_unknown = num_unknowns();
        gradient.setZero(n_unknown);
        std::vector<Eigen::Triplet<double>> triplets;
        double total = 0.0;
        const auto unknown = [&](int node, Eigen::Index mu) -> Eigen::Index {
            if (node <= 0 || node >= intervals_) return -1;
            return (node - 1) * m_ + mu;
        };
        for (const auto& er : rules_) {
            const int p = er.element.degree;
            const auto local = nodes.middleRows(er.element.first_node, p + 1);
            RealMatrix elem_hess = RealMatrix::Zero((p + 1) * m_, (p + 1) * m_);
            Eigen::VectorXd elem_grad = Eigen::VectorXd::Zero((p + 1) * m_);
            for (std::size_t q = 0; q < er.weights.size(); ++q) {
                const Eigen::VectorXd& nv = er.values[q];
                const Eigen::VectorXd& nd = er.derivs[q];
                const ParamVector lam = local.transpose() * nv;
                const ParamVector vel = local.transpose() * nd;
                const auto ld = lagrangian_derivatives(problem_, lam, vel, true, steps_);
                const double w = er.weights[q];
                total += w * ld.value;
                // Map local (lambda, v) derivatives onto node coordinates:
                // d lambda / d node_a = N_a, d v / d node_a = N'_a.
                RealMatrix jac = RealMatrix::Zero(2 * m_, (p + 1) * m_);
                for (int a = 0; a <= p; ++a) {
                    for (Eigen::Index mu = 0; mu < m_; ++mu) {
                        jac(mu, a * m_ + mu) = nv(a);
                        jac(m_ + mu, a * m_ + mu) = nd(a);
                    }
                }
                elem_grad += w * jac.transpose() * ld.gradient;
                elem_hess += w * jac.transpose() * ld.hessian * jac;
            }
            for (int a = 0; a <= p; ++a) {
                for (Eigen::Index mu = 0; mu < m_; ++mu) {
                    const Eigen::Index row = unknown(er.element.first_node + a, mu);
                    if (row < 0) continue;
                    gradient(row) += elem_grad(a * m_ + mu);
                    for (int b = 0; b <= p; ++b) {
                        for (Eigen::Index nu = 0; nu < m_; ++nu) {
                            const Eigen::Index col = unknown(er.element.first_node + b, nu);
                            if (col < 0) continue;
                            triplets.emplace_back(row, col, elem_hess(a * m_ + mu, b * m_ + nu));
                        }
                    }
                }
            }
        }
        hessian.resize(n_unknown, n_unknown);
        hessian.setFromTriplets(triplets.begin(), triplets.end());
        return total;
    }

private:
    struct ElementRule {
        discretization::LagrangeElement element;
        double width = 0.0;
        std::vector<Eigen::VectorXd> values;
        std::vector<Eigen::VectorXd> derivs;
        std::vector<double> weights;
    };

    const ActionProblem& problem_;
    int intervals_;
    Eigen::Index m_;
    DerivativeSteps steps_;
    std::vector<discretization::LagrangeElement> elements_;
    std::vector<ElementRule> rules_;
};

/// Fill path-dependent fields of a result from its converged path.
inline void finalize_result(const ActionProblem& problem, SolveResult& result)
{
    result.action = action(problem, result.path);
    result.el_residual_max = el_residual(problem, result.path).max_abs;
    result.accumulated = accumulate(problem, result.path);
}

} // namespace detail

/// Minimize the action over interior nodes starting from `init` (default: the
/// straight line between the endpoints).
inline SolveResult solve_transcription(const ActionProblem& problem,
                                       const TranscriptionOptions& options = {},
                                       const std::optional<Path>& init = std::nullopt)
{
    problem.validate();
    if (options.intervals < 32) {
        throw SolverError("transcription needs a grid of at least 32 intervals");
    }
    Path start = init ? *init
                      : Path::straight_line(problem.lambda_a, problem.lambda_b, options.intervals);
    if (start.intervals() != options.intervals ||
        start.num_params() != static_cast<Eigen::Index>(problem.num_params())) {
        throw SolverError("initial path does not match the grid size or parameter count");
    }

    ActionProblem minimized = problem;
    if (problem.kinetic == KineticTerm::K1 && problem.potential.kind == PotentialKind::none) {
        minimized.kinetic = KineticTerm::K2;
    }
    detail::ElementAction objective(minimized, options.intervals, options.steps);
    Eigen::VectorXd x = objective.unknowns_from(start.nodes());
    Eigen::VectorXd grad;
    Eigen::SparseMatrix<double> hess;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

    SolveResult result{.path = start};
    result.method = SolveMethod::transcription;
    result.init = init ? "user" : "straight_line";

    double shift = 0.0;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        const double f = objective.assemble(x, grad, hess);
        if (grad.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            result.converged = true;
            break;
        }

        // Factor H + shift*I, raising the shift until it is positive definite.
        Eigen::VectorXd step;
        const double diag_scale = std::max(1e-300, hess.diagonal().cwiseAbs().maxCoeff());
        shift = shift > 0.0 ? shift * 0.1 : 0.0;
        if (shift < 1e-14 * diag_scale) shift = 0.0;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Eigen::SparseMatrix<double> shifted = hess;
            if (shift > 0.0) {
                for (Eigen::Index i = 0; i < shifted.rows(); ++i) {
                    shifted.coeffRef(i, i) += shift;
                }
            }
            ldlt.compute(shifted);
            if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0) {
                step = ldlt.solve(-grad);
                break;
            }
            shift = shift > 0.0 ? shift * 10.0 : 1e-10 * diag_scale;
        }
        if (step.size() == 0) {
            step = -grad / diag_scale;
        }

        const double slope = grad.dot(step);
        const double roundoff = 1e-13 * (1.0 + std::abs(f));
        double alpha = 1.0;
        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        if (-slope < roundoff) {
            // Predicted decrease is below roundoff: take the full step if it
            // does not increase the action beyond noise.
            f_new = objective.value(x + step);
            accepted = f_new <= f + roundoff;
        } else {
            for (int ls = 0; ls < 50; ++ls) {
                f_new = objective.value(x + alpha * step);
                if (f_new <= f + 1e-4 * alpha * slope) {
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
        }
        if (!accepted) {
            result.message = "line search stalled before reaching the gradient tolerance";
            break;
        }
        x += alpha * step;
        if (alpha == 1.0 &&
            std::abs(f_new - f) <= options.relative_action_tolerance * std::abs(f)) {
            result.converged = true;
            ++it;
            break;
        }
    }
    result.iterations = it;
    if (!result.converged && result.message.empty()) {
        std::ostringstream msg;
        msg << "no convergence after " << options.max_iterations
            << " iterations; returning the best path found";
        result.message = msg.str();
    }
    result.path = Path(objective.nodes_from(x));
    detail::finalize_result(problem, result);
    return result;
}

} // namespace qaction
