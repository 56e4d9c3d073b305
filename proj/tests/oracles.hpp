// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations for the test suites. Nothing here calls
// into the library routines it is used to check: the exponential is a Taylor
// series, the Frechet derivative goes through the eigenbasis, the metric
// comes from fidelities, and the two-qubit family is written out in closed
// form.

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "qaction/qaction.hpp"

namespace oracle {

using qaction::Complex;
using qaction::ComplexMatrix;
using qaction::ParamVector;
using qaction::RealMatrix;
using qaction::StateVector;

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------- matrices

/// exp(A) by scaling, a truncated Taylor series and repeated squaring.
inline ComplexMatrix expm_taylor(const ComplexMatrix& a)
{
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
    const ComplexMatrix x = a / std::pow(2.0, squarings);
    ComplexMatrix term = ComplexMatrix::Identity(a.rows(), a.cols());
    ComplexMatrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * x / static_cast<double>(k);
        sum += term;
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    return sum;
}

/// d/dt exp(i(H + tE)) at t = 0 from the eigenbasis of H. The divided
/// difference of exp(ix) is written as i e^{i(a+b)/2} sinc((a-b)/2), which
/// stays accurate for close and equal eigenvalues.
inline ComplexMatrix frechet_daleckii_krein(const ComplexMatrix& h, const ComplexMatrix& e)
{
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    const Eigen::VectorXd a = es.eigenvalues();
    const ComplexMatrix& v = es.eigenvectors();
    ComplexMatrix inner = v.adjoint() * e * v;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
        for (Eigen::Index k = 0; k < a.size(); ++k) {
            const double half = 0.5 * (a(j) - a(k));
            const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
            inner(j, k) *= Complex(0.0, 1.0) * std::exp(Complex(0.0, 0.5 * (a(j) + a(k)))) * sinc;
        }
    }
    return v * inner * v.adjoint();
}

/// Kronecker product by explicit index arithmetic.
inline ComplexMatrix kron_loops(const ComplexMatrix& a, const ComplexMatrix& b)
{
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            for (Eigen::Index k = 0; k < b.rows(); ++k)
                for (Eigen::Index l = 0; l < b.cols(); ++l)
                    out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    return out;
}

/// Partial trace over the second factor of a (da*db)-dimensional operator.
inline ComplexMatrix trace_out_second(const ComplexMatrix& rho, Eigen::Index da, Eigen::Index db)
{
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < da; ++j)
            for (Eigen::Index k = 0; k < db; ++k) out(i, j) += rho(i * db + k, j * db + k);
    return out;
}

// ---------------------------------------------------------------- random data

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index d, double scale = 1.0)
{
    std::normal_distribution<double> n(0.0, scale);
    ComplexMatrix a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
    return 0.5 * (a + a.adjoint());
}

inline StateVector random_state(std::mt19937_64& rng, Eigen::Index d)
{
    std::normal_distribution<double> n(0.0, 1.0);
    StateVector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = Complex(n(rng), n(rng));
    return v.normalized();
}

inline ParamVector random_params(std::mt19937_64& rng, Eigen::Index m, double scale = 1.0)
{
    std::normal_distribution<double> n(0.0, scale);
    ParamVector v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = n(rng);
    return v;
}

/// Random family on a random factorization of total dimension <= max_dim.
inline qaction::HamiltonianFamily random_family(std::mt19937_64& rng, std::size_t m,
                                                std::size_t max_dim = 8)
{
    static const std::vector<std::vector<std::size_t>> shapes{
        {2}, {3}, {2, 2}, {2, 3}, {3, 2}, {2, 2, 2}, {4, 2}, {5}, {7}};
    std::vector<std::vector<std::size_t>> allowed;
    for (const auto& s : shapes) {
        std::size_t d = 1;
        for (auto x : s) d *= x;
        if (d <= max_dim) allowed.push_back(s);
    }
    std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
    const qaction::HilbertFactorization fact(allowed[pick(rng)]);
    const auto d = static_cast<Eigen::Index>(fact.total_dim());
    std::vector<ComplexMatrix> gens;
    for (std::size_t mu = 0; mu < m; ++mu) gens.push_back(random_hermitian(rng, d, 0.5));
    return {gens, random_state(rng, d), fact};
}

// ---------------------------------------------------------------- geometry

/// Metric from the infidelity 1 - |<psi(l0)|psi(l)>|^2 = dl^T g dl + O(dl^3),
/// by second differences of the infidelity itself.
template <class StateFn>
RealMatrix fidelity_metric(const StateFn& state, const ParamVector& l0, double h = 1e-4)
{
    const auto m = l0.size();
    const StateVector psi0 = state(l0);
    const auto infidelity = [&](const ParamVector& l) {
        return 1.0 - std::norm(psi0.dot(state(l)));
    };
    RealMatrix g(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) {
            ParamVector pp = l0, pm = l0, mp = l0, mm = l0;
            pp(a) += h;
            pp(b) += h;
            pm(a) += h;
            pm(b) -= h;
            mp(a) -= h;
            mp(b) += h;
            mm(a) -= h;
            mm(b) -= h;
            g(a, b) = (infidelity(pp) - infidelity(pm) - infidelity(mp) + infidelity(mm)) /
                      (8.0 * h * h);
        }
    }
    return g;
}

/// Christoffel symbols of the second kind, Gamma[a](b, c), from a metric
/// field given as a callable, with the textbook formula
/// Gamma^a_bc = 1/2 g^{ad} (d_b g_dc + d_c g_db - d_d g_bc).
template <class MetricFn>
std::vector<RealMatrix> christoffel_textbook(const MetricFn& metric, const ParamVector& l0,
                                             double h = 1e-4)
{
    const auto m = l0.size();
    std::vector<RealMatrix> dg; // dg[k](i, j) = d_k g_ij
    for (Eigen::Index k = 0; k < m; ++k) {
        ParamVector p = l0, q = l0;
        p(k) += h;
        q(k) -= h;
        dg.push_back((metric(p) - metric(q)) / (2.0 * h));
    }
    const RealMatrix ginv = metric(l0).inverse();
    std::vector<RealMatrix> gamma(static_cast<std::size_t>(m), RealMatrix::Zero(m, m));
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b)
            for (Eigen::Index c = 0; c < m; ++c)
                for (Eigen::Index d = 0; d < m; ++d)
                    gamma[static_cast<std::size_t>(a)](b, c) +=
                        0.5 * ginv(a, d) *
                        (dg[static_cast<std::size_t>(b)](d, c) + dg[static_cast<std::size_t>(c)](d, b) -
                         dg[static_cast<std::size_t>(d)](b, c));
    return gamma;
}

/// QGT pieces from parameter derivatives: gamma = Re<d_a psi|d_b psi>,
/// beta = -i<psi|d_a psi>, g = gamma - beta beta^T.
inline RealMatrix metric_from_derivatives(const StateVector& psi, const std::vector<StateVector>& dpsi)
{
    const auto m = static_cast<Eigen::Index>(dpsi.size());
    RealMatrix gamma(m, m);
    ParamVector beta(m);
    for (Eigen::Index a = 0; a < m; ++a) {
        beta(a) = (Complex(0.0, -1.0) * psi.dot(dpsi[static_cast<std::size_t>(a)])).real();
        for (Eigen::Index b = 0; b < m; ++b) {
            gamma(a, b) = dpsi[static_cast<std::size_t>(a)].dot(dpsi[static_cast<std::size_t>(b)]).real();
        }
    }
    return gamma - beta * beta.transpose();
}

// ---------------------------------------------------------------- two-qubit example

/// psi(theta, phi) for H = theta XX + phi ZZ acting on (|00> + |01>)/sqrt(2),
/// written out component by component.
inline StateVector two_qubit_state(double theta, double phi)
{
    const Complex i(0.0, 1.0);
    StateVector v(4);
    v(0) = std::exp(i * phi) * std::cos(theta);
    v(1) = std::exp(-i * phi) * std::cos(theta);
    v(2) = i * std::exp(-i * phi) * std::sin(theta);
    v(3) = i * std::exp(i * phi) * std::sin(theta);
    return v / std::sqrt(2.0);
}

inline double two_qubit_E(double t, double p)
{
    return 0.5 * std::pow(std::sin(2 * t), 2) * std::pow(std::sin(2 * p), 2);
}

inline double two_qubit_F(double t, double p)
{
    const double s2 = std::pow(std::sin(2 * t), 2);
    return (-2.0 * s2 * s2 * std::cos(8 * p) - 2.0 * std::pow(std::sin(4 * t), 2) * std::cos(4 * p) +
            s2 * (3.0 * std::cos(4 * t) + 5.0)) /
           64.0;
}

inline double two_qubit_Q(double t, double /*p*/) { return (5.0 - std::cos(4 * t)) / 8.0; }

/// Gradient (d/dtheta, d/dphi) of each integrand, differentiated by hand.
inline ParamVector two_qubit_grad_E(double t, double p)
{
    ParamVector g(2);
    g << std::sin(4 * t) * std::pow(std::sin(2 * p), 2),
        std::pow(std::sin(2 * t), 2) * std::sin(4 * p);
    return g;
}

inline ParamVector two_qubit_grad_F(double t, double p)
{
    const double s = std::sin(2 * t), c = std::cos(2 * t);
    ParamVector g(2);
    g << -0.25 * s * s * s * c * std::cos(8 * p) - 0.125 * std::sin(8 * t) * std::cos(4 * p) +
             std::sin(4 * t) / 16.0 + 3.0 * std::sin(8 * t) / 32.0,
        0.25 * std::pow(s, 4) * std::sin(8 * p) + 0.125 * std::pow(std::sin(4 * t), 2) * std::sin(4 * p);
    return g;
}

inline ParamVector two_qubit_grad_Q(double t, double /*p*/)
{
    ParamVector g(2);
    g << 0.5 * std::sin(4 * t), 0.0;
    return g;
}

/// The two-qubit family through the library types.
inline qaction::HamiltonianFamily two_qubit_family()
{
    StateVector omega = StateVector::Zero(4);
    omega(0) = omega(1) = 1.0 / std::sqrt(2.0);
    return {{qaction::pauli_string("XX"), qaction::pauli_string("ZZ")}, omega,
            qaction::HilbertFactorization::qubits(2)};
}

inline qaction::ActionProblem two_qubit_problem(qaction::PotentialKind kind,
                                                qaction::KineticTerm kinetic = qaction::KineticTerm::K2)
{
    qaction::PotentialSpec spec;
    spec.kind = kind;
    spec.bipartition.emplace(qaction::HilbertFactorization::qubits(2), std::vector<std::size_t>{0});
    spec.dephasing_basis = qaction::ProjectorBasis::computational(4);
    ParamVector a(2), b(2);
    a << 0.0, 0.0;
    b << pi / 4, 2 * pi;
    return {two_qubit_family(), kinetic, spec, a, b};
}

/// Single-qubit family H = a X + b Z on |0>. Its metric is curved and
/// degenerates on the line a = 0, so tests keep a away from zero.
inline qaction::HamiltonianFamily qubit_family()
{
    StateVector zero = StateVector::Zero(2);
    zero(0) = 1.0;
    return {{qaction::pauli('X'), qaction::pauli('Z')}, zero, qaction::HilbertFactorization::qubits(1)};
}

} // namespace oracle
