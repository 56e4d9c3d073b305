// SPDX-License-Identifier: Apache-2.0
//
// Linear Hamiltonian families H(lambda) = sum_mu lambda_mu G_mu and the states
// psi(lambda) = exp(iH(lambda)) |Omega> they generate.

#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qaction/qmath.hpp"

namespace qaction {

/// Single-qubit Pauli matrix for one of 'I', 'X', 'Y', 'Z'.
inline ComplexMatrix pauli(char label)
{
    ComplexMatrix p(2, 2);
    switch (label) {
    case 'I': p << 1.0, 0.0, 0.0, 1.0; break;
    case 'X': p << 0.0, 1.0, 1.0, 0.0; break;
    case 'Y': p << 0.0, -kImag, kImag, 0.0; break;
    case 'Z': p << 1.0, 0.0, 0.0, -1.0; break;
    default:
        throw DimensionError(std::string("unknown Pauli label '") + label + "'");
    }
    return p;
}

/// Tensor product of Paulis, e.g. "XZ" = X (x) Z.
inline ComplexMatrix pauli_string(std::string_view labels, std::size_t max_dim = kDefaultMaxDim)
{
    if (labels.empty()) {
        throw DimensionError("empty Pauli string");
    }
    ComplexMatrix out = pauli(labels.front());
    for (std::size_t k = 1; k < labels.size(); ++k) {
        out = kron(out, pauli(labels[k]), max_dim);
    }
    return out;
}

/// Generators, reference state and factorization of a linear family.
class HamiltonianFamily {
public:
    HamiltonianFamily(std::vector<ComplexMatrix> generators, StateVector reference_state,
                      HilbertFactorization factorization)
        : reference_(std::move(reference_state)), factorization_(std::move(factorization))
    {
        if (generators.empty()) {
            throw DimensionError("Hamiltonian family needs at least one generator");
        }
        const auto d = static_cast<Eigen::Index>(factorization_.total_dim());
        generators_.reserve(generators.size());
        for (std::size_t mu = 0; mu < generators.size(); ++mu) {
            const auto& g = generators[mu];
            if (g.rows() != d || g.cols() != d) {
                std::ostringstream msg;
                msg << "generator " << mu << " is " << g.rows() << "x" << g.cols()
                    << ", factorization has dimension " << d;
                throw DimensionError(msg.str());
            }
            generators_.push_back(require_hermitian(g, "generator " + std::to_string(mu)));
        }
        if (reference_.size() != d) {
            throw DimensionError("reference state dimension differs from the factorization");
        }
        const double norm = reference_.norm();
        if (std::abs(norm - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg << "reference state must be normalized (norm = " << norm << ")";
            throw DimensionError(msg.str());
        }
    }

    std::size_t num_params() const noexcept { return generators_.size(); }
    Eigen::Index dim() const noexcept { return reference_.size(); }
    const std::vector<ComplexMatrix>& generators() const noexcept { return generators_; }
    const StateVector& reference_state() const noexcept { return reference_; }
    const HilbertFactorization& factorization() const noexcept { return factorization_; }

private:
    std::vector<ComplexMatrix> generators_;
    StateVector reference_;
    HilbertFactorization factorization_;
};

/// State at lambda together with its parameter derivatives and its s-derivative.
struct StateJet {
    StateVector psi;
    std::vector<StateVector> dpsi_dmu;
    StateVector psi_prime;
};

inline void check_param_length(const HamiltonianFamily& fam, const ParamVector& v,
                               std::string_view what)
{
    if (static_cast<std::size_t>(v.size()) != fam.num_params()) {
        std::ostringstream msg;
        msg << what << " has length " << v.size() << ", family has " << fam.num_params()
            << " parameters";
        throw DimensionError(msg.str());
    }
}

inline ComplexMatrix hamiltonian_at(const HamiltonianFamily& fam, const ParamVector& lambda)
{
    check_param_length(fam, lambda, "lambda");
    ComplexMatrix h = ComplexMatrix::Zero(fam.dim(), fam.dim());
    for (std::size_t mu = 0; mu < fam.num_params(); ++mu) {
        h += lambda(static_cast<Eigen::Index>(mu)) * fam.generators()[mu];
    }
    return h;
}

/// psi(lambda) = exp(iH(lambda)) Omega.
inline StateVector evolve(const HamiltonianFamily& fam, const ParamVector& lambda)
{
    return exp_i_hermitian(hamiltonian_at(fam, lambda)) * fam.reference_state();
}

inline StateJet state_jet(const HamiltonianFamily& fam, const ParamVector& lambda,
                          const ParamVector& lambda_prime)
{
    check_param_length(fam, lambda_prime, "lambda_prime");
    const ComplexMatrix h = hamiltonian_at(fam, lambda);
    StateJet jet;
    jet.psi = exp_i_hermitian(h) * fam.reference_state();
    jet.psi_prime = StateVector::Zero(fam.dim());
    jet.dpsi_dmu.reserve(fam.num_params());
    for (std::size_t mu = 0; mu < fam.num_params(); ++mu) {
        jet.dpsi_dmu.push_back(frechet_exp_i(h, fam.generators()[mu]) * fam.reference_state());
        jet.psi_prime += lambda_prime(static_cast<Eigen::Index>(mu)) * jet.dpsi_dmu.back();
    }
    return jet;
}

inline StateJet state_jet(const HamiltonianFamily& fam, const ParamVector& lambda)
{
    return state_jet(fam, lambda, ParamVector::Zero(lambda.size()));
}

inline ComplexMatrix density(const StateVector& psi) { return psi * psi.adjoint(); }

inline ComplexMatrix density(const StateJet& jet) { return density(jet.psi); }

} // namespace qaction
