// SPDX-License-Identifier: Apache-2.0
//
// Problem statement, discretized paths and solver results.

#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qaction/geometry.hpp"
#include "qaction/resources.hpp"

namespace qaction {

enum class KineticTerm {
    /// Fubini-Study speed sqrt(<psi'|(1-psi)|psi'>).
    K1,
    /// Its square.
    K2,
};

inline std::string_view to_string(KineticTerm k) { return k == KineticTerm::K1 ? "K1" : "K2"; }

inline std::optional<KineticTerm> parse_kinetic_term(std::string_view name)
{
    if (name == "K1") return KineticTerm::K1;
    if (name == "K2") return KineticTerm::K2;
    return std::nullopt;
}

struct ActionProblem {
    HamiltonianFamily family;
    KineticTerm kinetic = KineticTerm::K2;
    PotentialSpec potential;
    ParamVector lambda_a;
    ParamVector lambda_b;

    std::size_t num_params() const noexcept { return family.num_params(); }

    void validate() const
    {
        check_param_length(family, lambda_a, "lambda_A");
        check_param_length(family, lambda_b, "lambda_B");
        potential.validate();
        if (potential.bipartition &&
            !(potential.bipartition->factorization() == family.factorization())) {
            throw FactorizationError("bipartition factorization differs from the family's");
        }
        if (potential.dephasing_basis &&
            static_cast<Eigen::Index>(potential.dephasing_basis->dim()) != family.dim()) {
            throw BasisError("dephasing basis dimension differs from the family's");
        }
    }
};

/// Curve lambda(s) sampled at s_k = k/N, k = 0..N; row k holds lambda(s_k).
class Path {
public:
    static constexpr int kMinIntervals = 8;

    explicit Path(RealMatrix nodes) : nodes_(std::move(nodes))
    {
        if (nodes_.rows() < kMinIntervals + 1) {
            std::ostringstream msg;
            msg << "path needs at least " << kMinIntervals << " intervals, got "
                << nodes_.rows() - 1;
            throw SolverError(msg.str());
        }
        if (nodes_.cols() == 0) {
            throw DimensionError("path nodes have no parameter columns");
        }
    }

    static Path straight_line(const ParamVector& a, const ParamVector& b, int intervals)
    {
        if (a.size() != b.size()) {
            throw DimensionError("straight_line: endpoints differ in length");
        }
        if (intervals < kMinIntervals) {
            throw SolverError("straight_line: too few intervals");
        }
        RealMatrix nodes(intervals + 1, a.size());
        for (int k = 0; k <= intervals; ++k) {
            const double s = static_cast<double>(k) / intervals;
            nodes.row(k) = ((1.0 - s) * a + s * b).transpose();
        }
        nodes.row(0) = a.transpose();
        nodes.row(intervals) = b.transpose();
        return Path(std::move(nodes));
    }

    int intervals() const noexcept { return static_cast<int>(nodes_.rows()) - 1; }
    Eigen::Index num_params() const noexcept { return nodes_.cols(); }
    double spacing() const noexcept { return 1.0 / intervals(); }
    double s(int k) const noexcept { return static_cast<double>(k) / intervals(); }
    ParamVector node(int k) const { return nodes_.row(k).transpose(); }
    const RealMatrix& nodes() const noexcept { return nodes_; }

private:
    RealMatrix nodes_;
};

/// Accumulated resources: integrals of E, F and Q along a path.
struct Accumulated {
    double entanglement = 0.0;
    double antiflatness = 0.0;
    double coherence = 0.0;
};

enum class SolveMethod { transcription, shooting };

inline std::string_view to_string(SolveMethod m)
{
    return m == SolveMethod::transcription ? "transcription" : "shooting";
}

inline std::optional<SolveMethod> parse_solve_method(std::string_view name)
{
    if (name == "transcription") return SolveMethod::transcription;
    if (name == "shooting") return SolveMethod::shooting;
    return std::nullopt;
}

/// One converged shooting solution.
struct ShootingBranch {
    ParamVector initial_velocity;
    double action = 0.0;
    int restart = 0;
};

struct SolveResult {
    Path path;
    double action = 0.0;
    double el_residual_max = 0.0;
    Accumulated accumulated{};
    SolveMethod method = SolveMethod::transcription;
    int iterations = 0;
    bool converged = false;
    /// Warning or diagnostic text; empty on clean convergence.
    std::string message{};
    /// How the iteration was seeded, e.g. "straight_line".
    std::string init{};
    /// Distinct shooting solutions, least action first (shooting only).
    std::vector<ShootingBranch> branches{};
};

} // namespace qaction
