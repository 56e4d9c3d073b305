// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear algebra for small Hilbert spaces.
//
// Sign convention: exp_i_hermitian(H) returns exp(+iH), not the exp(-iHt)
// common in time-evolution code. Every unitary in this library follows it.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <iostream>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qaction/errors.hpp"

namespace qaction {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using ParamVector = Eigen::VectorXd;

inline constexpr Complex kImag{0.0, 1.0};

/// Largest Hilbert-space dimension accepted by kron (6 qubits).
inline constexpr std::size_t kDefaultMaxDim = 64;

namespace tolerance {
/// Below this Hermiticity defect an operator is symmetrized silently.
inline constexpr double hermitian_silent = 1e-10;
/// Between silent and hard the operator is symmetrized with a warning.
inline constexpr double hermitian_hard = 1e-8;
inline constexpr double unit_trace = 1e-10;
inline constexpr double basis_completeness = 1e-10;
} // namespace tolerance

inline void warn(std::string_view message)
{
    std::clog << "qaction: warning: " << message << '\n';
}

/// Elementwise max |A - A^dagger|.
inline double hermiticity_defect(const ComplexMatrix& a)
{
    if (a.rows() != a.cols()) {
        throw DimensionError("hermiticity check on a non-square matrix");
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

/// Returns (A + A^dagger)/2 when A is Hermitian up to roundoff; throws otherwise.
inline ComplexMatrix require_hermitian(const ComplexMatrix& a, std::string_view what)
{
    if (a.rows() == 0) {
        throw DimensionError(std::string(what) + ": empty matrix");
    }
    const double defect = hermiticity_defect(a);
    if (!(defect <= tolerance::hermitian_hard)) {
        std::ostringstream msg;
        msg << what << ": matrix is not Hermitian (max |A - A^dagger| = " << defect << ")";
        throw HermiticityError(msg.str());
    }
    if (defect > tolerance::hermitian_silent) {
        std::ostringstream msg;
        msg << what << ": symmetrizing operator with Hermiticity defect " << defect;
        warn(msg.str());
    }
    return 0.5 * (a + a.adjoint());
}

/// Ordered local dimensions of a tensor-product Hilbert space.
class HilbertFactorization {
public:
    HilbertFactorization() = default;

    explicit HilbertFactorization(std::vector<std::size_t> dims) : dims_(std::move(dims))
    {
        if (dims_.empty()) {
            throw FactorizationError("factorization needs at least one subsystem");
        }
        for (auto d : dims_) {
            if (d == 0) {
                throw FactorizationError("subsystem dimensions must be positive");
            }
        }
    }

    static HilbertFactorization qubits(std::size_t n)
    {
        return HilbertFactorization(std::vector<std::size_t>(n, 2));
    }

    const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return dims_.size(); }

    std::size_t total_dim() const
    {
        return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1},
                               std::multiplies<>());
    }

    bool operator==(const HilbertFactorization&) const = default;

private:
    std::vector<std::size_t> dims_;
};

/// Kronecker product; the first factor carries the most significant index.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                          std::size_t max_dim = kDefaultMaxDim)
{
    const auto rows = static_cast<std::size_t>(a.rows() * b.rows());
    const auto cols = static_cast<std::size_t>(a.cols() * b.cols());
    if (rows > max_dim || cols > max_dim) {
        std::ostringstream msg;
        msg << "kron: result " << rows << "x" << cols << " exceeds dense limit " << max_dim;
        throw DimensionError(msg.str());
    }
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

inline Complex trace(const ComplexMatrix& a) { return a.trace(); }

/// tr(rho^2), real part.
inline double purity(const ComplexMatrix& rho)
{
    // tr(A A) = sum_ij A_ij A_ji; for Hermitian A this is sum |A_ij|^2.
    return (rho.cwiseProduct(rho.transpose())).sum().real();
}

/// Reduced operator on the subsystems listed in `keep` (tracing out the rest).
inline ComplexMatrix partial_trace(const ComplexMatrix& rho, const HilbertFactorization& fact,
                                   std::span<const std::size_t> keep)
{
    const auto& dims = fact.dims();
    const std::size_t n = dims.size();
    const std::size_t total = fact.total_dim();
    if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != total) {
        std::ostringstream msg;
        msg << "partial_trace: factorization of dimension " << total
            << " does not match operator of size " << rho.rows() << "x" << rho.cols();
        throw FactorizationError(msg.str());
    }
    std::vector<bool> kept(n, false);
    for (auto k : keep) {
        if (k >= n) {
            throw FactorizationError("partial_trace: subsystem index out of range");
        }
        if (kept[k]) {
            throw FactorizationError("partial_trace: duplicate subsystem index");
        }
        kept[k] = true;
    }
    if (keep.empty() || keep.size() == n) {
        throw FactorizationError("partial_trace: kept set must be a nonempty proper subset");
    }

    // Decompose every full index into (kept index, traced index).
    std::vector<std::size_t> kept_of(total), traced_of(total);
    std::size_t dim_keep = 1;
    for (std::size_t s = 0; s < n; ++s) {
        if (kept[s]) dim_keep *= dims[s];
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        std::size_t kidx = 0, tidx = 0, kstride = 1, tstride = 1;
        for (std::size_t s = n; s-- > 0;) {
            const std::size_t digit = rem % dims[s];
            rem /= dims[s];
            if (kept[s]) {
                kidx += digit * kstride;
                kstride *= dims[s];
            } else {
                tidx += digit * tstride;
                tstride *= dims[s];
            }
        }
        kept_of[idx] = kidx;
        traced_of[idx] = tidx;
    }

    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim_keep),
                                            static_cast<Eigen::Index>(dim_keep));
    for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t j = 0; j < total; ++j) {
            if (traced_of[i] == traced_of[j]) {
                out(static_cast<Eigen::Index>(kept_of[i]), static_cast<Eigen::Index>(kept_of[j])) +=
                    rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            }
        }
    }
    return out;
}

inline ComplexMatrix partial_trace(const ComplexMatrix& rho, const HilbertFactorization& fact,
                                   std::initializer_list<std::size_t> keep)
{
    return partial_trace(rho, fact, std::span<const std::size_t>(keep.begin(), keep.size()));
}

/// U = exp(+iH) for Hermitian H, through the eigendecomposition of H.
inline ComplexMatrix exp_i_hermitian(const ComplexMatrix& h)
{
    const ComplexMatrix herm = require_hermitian(h, "exp_i_hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm);
    if (es.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "exp_i_hermitian: eigendecomposition did not converge (dim " << h.rows()
            << ", max |H_ij| = " << herm.cwiseAbs().maxCoeff() << ")";
        throw NumericalError(msg.str());
    }
    const Eigen::VectorXcd phases =
        (kImag * es.eigenvalues().cast<Complex>()).array().exp().matrix();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Directional derivative of H -> exp(iH) at H along E.
///
/// Uses the block identity exp(i[[H, E], [0, H]]) = [[exp(iH), D], [0, exp(iH)]].
inline ComplexMatrix frechet_exp_i(const ComplexMatrix& h, const ComplexMatrix& e)
{
    const ComplexMatrix herm_h = require_hermitian(h, "frechet_exp_i (base point)");
    const ComplexMatrix herm_e = require_hermitian(e, "frechet_exp_i (direction)");
    if (herm_h.rows() != herm_e.rows()) {
        throw DimensionError("frechet_exp_i: base point and direction differ in dimension");
    }
    const Eigen::Index d = herm_h.rows();
    ComplexMatrix block = ComplexMatrix::Zero(2 * d, 2 * d);
    block.topLeftCorner(d, d) = kImag * herm_h;
    block.topRightCorner(d, d) = kImag * herm_e;
    block.bottomRightCorner(d, d) = kImag * herm_h;
    const ComplexMatrix expd = block.exp();
    if (!expd.allFinite()) {
        std::ostringstream msg;
        msg << "frechet_exp_i: block exponential produced non-finite entries (max |H_ij| = "
            << herm_h.cwiseAbs().maxCoeff() << ")";
        throw NumericalError(msg.str());
    }
    return expd.topRightCorner(d, d);
}

/// Complete set of rank-1 orthogonal projectors defining a dephasing map.
class ProjectorBasis {
public:
    ProjectorBasis() = default;

    static ProjectorBasis computational(std::size_t dim)
    {
        if (dim == 0) {
            throw BasisError("computational basis needs a positive dimension");
        }
        ProjectorBasis basis;
        basis.dim_ = dim;
        basis.computational_ = true;
        const auto d = static_cast<Eigen::Index>(dim);
        for (Eigen::Index k = 0; k < d; ++k) {
            ComplexMatrix p = ComplexMatrix::Zero(d, d);
            p(k, k) = 1.0;
            basis.projectors_.push_back(std::move(p));
        }
        return basis;
    }

    /// Projectors |v_k><v_k| from an orthonormal list of vectors.
    static ProjectorBasis from_vectors(const std::vector<StateVector>& vectors)
    {
        std::vector<ComplexMatrix> projectors;
        projectors.reserve(vectors.size());
        for (const auto& v : vectors) {
            projectors.push_back(v * v.adjoint());
        }
        return from_projectors(std::move(projectors));
    }

    static ProjectorBasis from_projectors(std::vector<ComplexMatrix> projectors)
    {
        if (projectors.empty()) {
            throw BasisError("dephasing basis is empty");
        }
        const Eigen::Index d = projectors.front().rows();
        if (static_cast<Eigen::Index>(projectors.size()) != d) {
            throw BasisError("dephasing basis must contain exactly dim projectors");
        }
        ComplexMatrix sum = ComplexMatrix::Zero(d, d);
        for (std::size_t k = 0; k < projectors.size(); ++k) {
            const auto& p = projectors[k];
            if (p.rows() != d || p.cols() != d) {
                throw BasisError("dephasing projectors differ in dimension");
            }
            if (hermiticity_defect(p) > tolerance::basis_completeness ||
                (p * p - p).cwiseAbs().maxCoeff() > tolerance::basis_completeness ||
                std::abs(p.trace() - Complex(1.0)) > tolerance::basis_completeness) {
                throw BasisError("dephasing basis element " + std::to_string(k) +
                                 " is not a rank-1 projector");
            }
            for (std::size_t l = 0; l < k; ++l) {
                if ((p * projectors[l]).cwiseAbs().maxCoeff() > tolerance::basis_completeness) {
                    throw BasisError("dephasing projectors " + std::to_string(l) + " and " +
                                     std::to_string(k) + " are not orthogonal");
                }
            }
            sum += p;
        }
        if ((sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() >
            tolerance::basis_completeness) {
            throw BasisError("dephasing projectors do not sum to the identity");
        }
        ProjectorBasis basis;
        basis.dim_ = static_cast<std::size_t>(d);
        basis.projectors_ = std::move(projectors);
        return basis;
    }

    std::size_t dim() const noexcept { return dim_; }
    bool is_computational() const noexcept { return computational_; }

    const std::vector<ComplexMatrix>& projectors() const noexcept { return projectors_; }

private:
    std::size_t dim_ = 0;
    bool computational_ = false;
    std::vector<ComplexMatrix> projectors_;
};

/// Dephasing superoperator: sum_k chi_k rho chi_k.
inline ComplexMatrix dephase(const ComplexMatrix& rho, const ProjectorBasis& basis)
{
    if (rho.rows() != rho.cols() || static_cast<std::size_t>(rho.rows()) != basis.dim()) {
        throw DimensionError("dephase: operator and basis dimensions differ");
    }
    if (basis.is_computational()) {
        return ComplexMatrix(rho.diagonal().asDiagonal());
    }
    ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
    for (const auto& chi : basis.projectors()) {
        out += chi * rho * chi;
    }
    return out;
}

} // namespace qaction
