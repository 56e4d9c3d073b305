// SPDX-License-Identifier: Apache-2.0
//
// Shooting solver for K2 problems. The Euler-Lagrange system of
// L = v^T g v - V reads
//
//     lambda''^a = -Gamma^a_{bc} v^b v^c - 1/2 g^{ab} d_b V,
//
// integrated from lambda_A with Dormand-Prince; Newton on the initial
// velocity hits lambda_B. Random restarts collect distinct branches and the
// least-action branch is returned.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "qaction/action.hpp"
#include "qaction/ode.hpp"
#include "qaction/transcription.hpp"

namespace qaction {

struct ShootingOptions {
    int intervals = 400;
    int restarts = 16;
    unsigned long long seed = 0;
    double target_tolerance = 1e-10;
    int max_newton = 40;
    /// Spread of the random initial-velocity perturbations, relative to
    /// max(1, |lambda_B - lambda_A|_inf).
    double perturbation = 0.25;
    /// Finite-difference step for metric derivatives.
    double metric_step = 1e-4;
    /// Integrator for the final trajectories and the polishing Newton steps.
    ode::Options integrator{};
    /// Looser integrator used while restarts search for branches.
    ode::Options coarse_integrator{.rtol = 1e-8, .atol = 1e-9};
    double coarse_tolerance = 1e-6;
};

namespace detail {

class Shooter {
public:
    Shooter(const ActionProblem& problem, const ShootingOptions& options)
        : problem_(problem), options_(options), m_(static_cast<Eigen::Index>(problem.num_params()))
    {
    }

    /// d/ds (lambda, v) for the K2 Euler-Lagrange system.
    Eigen::VectorXd rhs(const Eigen::VectorXd& y) const
    {
        const ParamVector lam = y.head(m_);
        const ParamVector vel = y.tail(m_);
        const RealMatrix g = qgt(problem_.family, lam).g;
        std::vector<RealMatrix> dg;
        dg.reserve(static_cast<std::size_t>(m_));
        for (Eigen::Index mu = 0; mu < m_; ++mu) {
            ParamVector lp = lam, lm = lam;
            lp(mu) += options_.metric_step;
            lm(mu) -= options_.metric_step;
            dg.push_back((qgt(problem_.family, lp).g - qgt(problem_.family, lm).g) /
                         (2.0 * options_.metric_step));
        }
        const ChristoffelSymbols gamma = christoffel_from_metric(g, dg);
        const ParamVector grad_v = potential_gradient(problem_.family, lam, problem_.potential);

        Eigen::VectorXd out(2 * m_);
        out.head(m_) = vel;
        ParamVector acc = -0.5 * g.ldlt().solve(grad_v);
        for (Eigen::Index a = 0; a < m_; ++a) {
            acc(a) -= vel.dot(gamma[static_cast<std::size_t>(a)] * vel);
        }
        out.tail(m_) = acc;
        return out;
    }

    /// Endpoint lambda(1) for initial velocity v0.
    ParamVector endpoint(const ParamVector& v0, const ode::Options& integrator) const
    {
        Eigen::VectorXd y(2 * m_);
        y << problem_.lambda_a, v0;
        ode::Stats stats;
        ode::integrate([this](double, const Eigen::VectorXd& state) { return rhs(state); }, y,
                       0.0, 1.0, integrator, stats);
        return y.head(m_);
    }

    /// Trajectory sampled on the uniform grid.
    Path trajectory(const ParamVector& v0) const
    {
        const int n = options_.intervals;
        RealMatrix nodes(n + 1, m_);
        Eigen::VectorXd y(2 * m_);
        y << problem_.lambda_a, v0;
        nodes.row(0) = problem_.lambda_a.transpose();
        ode::Stats stats;
        const auto f = [this](double, const Eigen::VectorXd& state) { return rhs(state); };
        for (int k = 0; k < n; ++k) {
            ode::integrate(f, y, static_cast<double>(k) / n, static_cast<double>(k + 1) / n,
                           options_.integrator, stats);
            nodes.row(k + 1) = y.head(m_).transpose();
        }
        return Path(std::move(nodes));
    }

    struct NewtonOutcome {
        bool converged = false;
        /// Stopped early because the iterate approached an already known branch.
        bool merged = false;
        ParamVector velocity;
        int iterations = 0;
    };

    /// Newton iteration on the initial velocity. When `known` is given, the
    /// iteration stops as soon as it comes within `merge_radius` of one of them.
    NewtonOutcome newton(ParamVector v, const ode::Options& integrator, double tolerance,
                         const std::vector<ParamVector>& known = {},
                         double merge_radius = 0.0) const
    {
        NewtonOutcome out;
        ParamVector miss = endpoint(v, integrator) - problem_.lambda_b;
        for (int it = 0; it < options_.max_newton; ++it) {
            out.iterations = it + 1;
            if (miss.lpNorm<Eigen::Infinity>() < tolerance) {
                out.converged = true;
                break;
            }
            for (const auto& k : known) {
                if ((k - v).lpNorm<Eigen::Infinity>() < merge_radius) {
                    out.merged = true;
                    out.velocity = k;
                    return out;
                }
            }
            RealMatrix jac(m_, m_);
            for (Eigen::Index mu = 0; mu < m_; ++mu) {
                ParamVector vp = v;
                const double dv = 1e-6 * std::max(1.0, std::abs(v(mu)));
                vp(mu) += dv;
                jac.col(mu) =
                    (endpoint(vp, integrator) - problem_.lambda_b - miss) / (vp(mu) - v(mu));
            }
            const ParamVector step = -jac.fullPivLu().solve(miss);
            if (!step.allFinite()) break;
            double alpha = 1.0;
            bool improved = false;
            for (int ls = 0; ls < 12; ++ls) {
                const ParamVector trial = v + alpha * step;
                ParamVector trial_miss;
                try {
                    trial_miss = endpoint(trial, integrator) - problem_.lambda_b;
                } catch (const Error&) {
                    alpha *= 0.5;
                    continue;
                }
                if (trial_miss.norm() < miss.norm()) {
                    v = trial;
                    miss = trial_miss;
                    improved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if (!improved) break;
        }
        if (!out.converged && miss.lpNorm<Eigen::Infinity>() < tolerance) {
            out.converged = true;
        }
        out.velocity = v;
        return out;
    }

private:
    const ActionProblem& problem_;
    const ShootingOptions& options_;
    Eigen::Index m_;
};

} // namespace detail

/// Solve a K2 problem by shooting with random restarts.
inline SolveResult solve_shooting(const ActionProblem& problem,
                                  const ShootingOptions& options = {})
{
    problem.validate();
    if (problem.kinetic != KineticTerm::K2) {
        throw SolverError("the shooting solver handles the K2 kinetic term only; use transcription "
                          "for K1");
    }
    if (options.restarts < 1) {
        throw SolverError("shooting needs at least one restart");
    }
    detail::Shooter shooter(problem, options);
    const ParamVector delta = problem.lambda_b - problem.lambda_a;
    const double spread = options.perturbation * std::max(1.0, delta.lpNorm<Eigen::Infinity>());
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Coarse search: every restart runs Newton with the loose integrator and
    // merges into a known branch as soon as it gets close to one.
    std::vector<ParamVector> coarse;
    std::vector<int> coarse_restart;
    int total_iterations = 0;
    std::string last_error;
    for (int r = 0; r < options.restarts; ++r) {
        ParamVector v0 = delta;
        if (r > 0) {
            for (Eigen::Index mu = 0; mu < v0.size(); ++mu) v0(mu) += spread * normal(rng);
        }
        detail::Shooter::NewtonOutcome outcome;
        try {
            outcome = shooter.newton(v0, options.coarse_integrator, options.coarse_tolerance,
                                     coarse, 1e-3 * std::max(1.0, delta.lpNorm<Eigen::Infinity>()));
        } catch (const Error& e) {
            last_error = e.what();
            continue;
        }
        total_iterations += outcome.iterations;
        if (!outcome.converged || outcome.merged) continue;
        coarse.push_back(outcome.velocity);
        coarse_restart.push_back(r);
    }

    // Polish each distinct branch with the tight integrator.
    std::vector<ShootingBranch> branches;
    for (std::size_t b = 0; b < coarse.size(); ++b) {
        detail::Shooter::NewtonOutcome outcome;
        try {
            outcome = shooter.newton(coarse[b], options.integrator, options.target_tolerance);
        } catch (const Error& e) {
            last_error = e.what();
            continue;
        }
        total_iterations += outcome.iterations;
        if (!outcome.converged) continue;
        const bool known = std::any_of(branches.begin(), branches.end(), [&](const auto& br) {
            return (br.initial_velocity - outcome.velocity).template lpNorm<Eigen::Infinity>() <
                   1e-6 * std::max(1.0, outcome.velocity.template lpNorm<Eigen::Infinity>());
        });
        if (known) continue;
        ShootingBranch branch;
        branch.initial_velocity = outcome.velocity;
        branch.restart = coarse_restart[b];
        try {
            branch.action = action(problem, shooter.trajectory(outcome.velocity));
        } catch (const Error& e) {
            last_error = e.what();
            continue;
        }
        branches.push_back(std::move(branch));
    }
    if (branches.empty()) {
        std::ostringstream msg;
        msg << "no shooting solution found after " << options.restarts
            << " restarts; use the transcription solver instead";
        if (!last_error.empty()) msg << " (last error: " << last_error << ")";
        throw SolverError(msg.str());
    }
    std::stable_sort(branches.begin(), branches.end(),
                     [](const auto& a, const auto& b) { return a.action < b.action; });

    SolveResult result{.path = shooter.trajectory(branches.front().initial_velocity)};
    result.method = SolveMethod::shooting;
    result.converged = true;
    result.iterations = total_iterations;
    result.init = "straight_line_velocity+random_restarts";
    result.branches = std::move(branches);
    detail::finalize_result(problem, result);
    return result;
}

} // namespace qaction
