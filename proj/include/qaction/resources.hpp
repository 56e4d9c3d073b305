// SPDX-License-Identifier: Apache-2.0
//
// Resource potentials of a pure state: linear-entropy entanglement,
// anti-flatness of the reduced spectrum, and 2-norm coherence.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qaction/qmath.hpp"
#include "qaction/statefam.hpp"

namespace qaction {

enum class PotentialKind { entanglement, antiflatness, coherence, none };

inline std::string_view to_string(PotentialKind kind)
{
    switch (kind) {
    case PotentialKind::entanglement: return "entanglement";
    case PotentialKind::antiflatness: return "antiflatness";
    case PotentialKind::coherence: return "coherence";
    case PotentialKind::none: return "none";
    }
    return "none";
}

inline std::optional<PotentialKind> parse_potential_kind(std::string_view name)
{
    for (auto kind : {PotentialKind::entanglement, PotentialKind::antiflatness,
                      PotentialKind::coherence, PotentialKind::none}) {
        if (name == to_string(kind)) return kind;
    }
    return std::nullopt;
}

/// Split H = H_X (x) H_Y; `keep` lists the subsystems forming X.
class Bipartition {
public:
    Bipartition(HilbertFactorization factorization, std::vector<std::size_t> keep)
        : factorization_(std::move(factorization)), keep_(std::move(keep))
    {
        std::vector<bool> seen(factorization_.size(), false);
        for (auto k : keep_) {
            if (k >= factorization_.size() || seen[k]) {
                throw FactorizationError("bipartition: invalid or duplicate subsystem index " +
                                         std::to_string(k));
            }
            seen[k] = true;
        }
        if (keep_.empty() || keep_.size() == factorization_.size()) {
            throw FactorizationError("bipartition must be a nonempty proper subset of subsystems");
        }
        std::sort(keep_.begin(), keep_.end());
    }

    const HilbertFactorization& factorization() const noexcept { return factorization_; }
    const std::vector<std::size_t>& subsystems() const noexcept { return keep_; }

    std::size_t dim_x() const
    {
        std::size_t d = 1;
        for (auto k : keep_) d *= factorization_.dims()[k];
        return d;
    }

    std::size_t dim_y() const { return factorization_.total_dim() / dim_x(); }

    /// The complementary split Y | X.
    Bipartition complement() const
    {
        std::vector<std::size_t> other;
        for (std::size_t k = 0; k < factorization_.size(); ++k) {
            if (!std::binary_search(keep_.begin(), keep_.end(), k)) other.push_back(k);
        }
        return Bipartition(factorization_, std::move(other));
    }

    ComplexMatrix reduce(const ComplexMatrix& rho) const
    {
        return partial_trace(rho, factorization_, keep_);
    }

private:
    HilbertFactorization factorization_;
    std::vector<std::size_t> keep_;
};

/// Which potential V enters the Lagrangian, plus the data every resource needs.
///
/// Both the bipartition and the dephasing basis are carried regardless of
/// `kind`, since accumulated resources are always reported for all three.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::none;
    std::optional<Bipartition> bipartition;
    std::optional<ProjectorBasis> dephasing_basis;

    void validate() const
    {
        if ((kind == PotentialKind::entanglement || kind == PotentialKind::antiflatness) &&
            !bipartition) {
            throw FactorizationError(std::string(to_string(kind)) +
                                     " potential requires a bipartition");
        }
        if (kind == PotentialKind::coherence && !dephasing_basis) {
            throw BasisError("coherence potential requires a dephasing basis");
        }
    }
};

namespace detail {

inline void require_pure(const ComplexMatrix& rho, std::string_view what)
{
    const double tr = rho.trace().real();
    const double pur = purity(rho);
    if (std::abs(tr - 1.0) > 1e-8 || std::abs(pur - 1.0) > 1e-8) {
        std::ostringstream msg;
        msg << what << ": expected a pure density operator (trace " << tr << ", purity " << pur
            << ")";
        throw DimensionError(msg.str());
    }
}

inline const Bipartition& require_bipartition(const PotentialSpec& spec)
{
    if (!spec.bipartition) {
        throw FactorizationError("potential spec carries no bipartition");
    }
    return *spec.bipartition;
}

inline const ProjectorBasis& require_basis(const PotentialSpec& spec)
{
    if (!spec.dephasing_basis) {
        throw BasisError("potential spec carries no dephasing basis");
    }
    return *spec.dephasing_basis;
}

} // namespace detail

/// E = 1 - tr[psi_X^2].
inline double entanglement(const ComplexMatrix& rho, const Bipartition& split)
{
    detail::require_pure(rho, "entanglement");
    return 1.0 - purity(split.reduce(rho));
}

/// F = tr[psi_X^3] - tr[psi_X^2]^2, unnormalized.
inline double antiflatness(const ComplexMatrix& rho, const Bipartition& split)
{
    detail::require_pure(rho, "antiflatness");
    const ComplexMatrix reduced = split.reduce(rho);
    const ComplexMatrix sq = reduced * reduced;
    const double p2 = sq.trace().real();
    const double p3 = (sq.cwiseProduct(reduced.transpose())).sum().real();
    return p3 - p2 * p2;
}

/// Q = 1 - Pur[D_B(psi)]; equals the squared 2-norm coherence on pure states.
inline double coherence(const ComplexMatrix& rho, const ProjectorBasis& basis)
{
    detail::require_pure(rho, "coherence");
    return 1.0 - purity(dephase(rho, basis));
}

inline double entanglement(const ComplexMatrix& rho, const PotentialSpec& spec)
{
    return entanglement(rho, detail::require_bipartition(spec));
}

inline double antiflatness(const ComplexMatrix& rho, const PotentialSpec& spec)
{
    return antiflatness(rho, detail::require_bipartition(spec));
}

inline double coherence(const ComplexMatrix& rho, const PotentialSpec& spec)
{
    return coherence(rho, detail::require_basis(spec));
}

inline double potential_value(const ComplexMatrix& rho, const PotentialSpec& spec)
{
    switch (spec.kind) {
    case PotentialKind::entanglement: return entanglement(rho, spec);
    case PotentialKind::antiflatness: return antiflatness(rho, spec);
    case PotentialKind::coherence: return coherence(rho, spec);
    case PotentialKind::none: return 0.0;
    }
    return 0.0;
}

inline double potential_value(const StateJet& jet, const PotentialSpec& spec)
{
    if (spec.kind == PotentialKind::none) return 0.0;
    return potential_value(density(jet), spec);
}

/// Value of V at lambda, skipping the parameter derivatives of the jet.
inline double potential_at(const HamiltonianFamily& fam, const ParamVector& lambda,
                           const PotentialSpec& spec)
{
    if (spec.kind == PotentialKind::none) return 0.0;
    return potential_value(density(evolve(fam, lambda)), spec);
}

/// Central-difference gradient dV/dlambda, step 1e-5 * max(1, |lambda_mu|).
inline ParamVector potential_gradient(const HamiltonianFamily& fam, const ParamVector& lambda,
                                      const PotentialSpec& spec)
{
    check_param_length(fam, lambda, "lambda");
    ParamVector grad = ParamVector::Zero(lambda.size());
    if (spec.kind == PotentialKind::none) return grad;
    for (Eigen::Index mu = 0; mu < lambda.size(); ++mu) {
        const double h = 1e-5 * std::max(1.0, std::abs(lambda(mu)));
        ParamVector plus = lambda, minus = lambda;
        plus(mu) += h;
        minus(mu) -= h;
        grad(mu) = (potential_at(fam, plus, spec) - potential_at(fam, minus, spec)) /
                   (plus(mu) - minus(mu));
    }
    return grad;
}

} // namespace qaction
