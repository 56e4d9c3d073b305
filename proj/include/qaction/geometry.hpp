// SPDX-License-Identifier: Apache-2.0
//
// Fubini-Study kinetic terms and the pulled-back quantum geometric tensor.
//
// For a family psi(lambda), <d_i psi, d_j psi> = gamma_ij + i sigma_ij and
// beta_i = -i <psi, d_i psi>. Under psi -> exp(i alpha(lambda)) psi the pieces
// gamma and beta shift, while g = gamma - beta beta^T stays put.

#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "qaction/statefam.hpp"

namespace qaction {

using RealMatrix = Eigen::MatrixXd;

struct QGTResult {
    RealMatrix gamma;
    RealMatrix sigma;
    ParamVector beta;
    RealMatrix g;
};

/// QGT from precomputed state and parameter derivatives.
inline QGTResult qgt(const StateVector& psi, const std::vector<StateVector>& dpsi)
{
    const auto m = static_cast<Eigen::Index>(dpsi.size());
    QGTResult out;
    out.gamma.resize(m, m);
    out.sigma.resize(m, m);
    out.beta.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const Complex overlap = psi.dot(dpsi[static_cast<std::size_t>(i)]);
        out.beta(i) = (-kImag * overlap).real();
        for (Eigen::Index j = 0; j < m; ++j) {
            const Complex q =
                dpsi[static_cast<std::size_t>(i)].dot(dpsi[static_cast<std::size_t>(j)]);
            out.gamma(i, j) = q.real();
            out.sigma(i, j) = q.imag();
        }
    }
    out.gamma = 0.5 * (out.gamma + out.gamma.transpose()).eval();
    out.sigma = 0.5 * (out.sigma - out.sigma.transpose()).eval();
    out.g = out.gamma - out.beta * out.beta.transpose();
    return out;
}

inline QGTResult qgt(const StateJet& jet) { return qgt(jet.psi, jet.dpsi_dmu); }

inline QGTResult qgt(const HamiltonianFamily& fam, const ParamVector& lambda)
{
    return qgt(state_jet(fam, lambda));
}

/// <psi'|(1 - |psi><psi|)|psi'>, the squared Fubini-Study speed.
inline double fs_speed_squared(const StateJet& jet)
{
    const Complex overlap = jet.psi.dot(jet.psi_prime);
    const double value = jet.psi_prime.squaredNorm() - std::norm(overlap);
    return std::max(0.0, value);
}

inline double fs_speed(const StateJet& jet) { return std::sqrt(fs_speed_squared(jet)); }

/// Outcome of recomputing the QGT under psi -> exp(i alpha) psi.
struct GaugeReport {
    RealMatrix gamma_prime;
    ParamVector beta_prime;
    RealMatrix g_prime;
    /// gamma' minus its predicted transform.
    RealMatrix gamma_law_residual;
    /// beta' minus beta - grad alpha.
    ParamVector beta_law_residual;
    /// g' minus g.
    RealMatrix g_difference;
    double max_error = 0.0;
    bool ok = false;
};

/// Recompute gamma', beta', g' for exp(i alpha) psi and compare with the
/// transformation laws. `alpha_value` and `alpha_gradient` sample alpha at lambda.
inline GaugeReport gauge_transform_check(const HamiltonianFamily& fam, const ParamVector& lambda,
                                         double alpha_value, const ParamVector& alpha_gradient,
                                         double tolerance = 1e-8)
{
    check_param_length(fam, alpha_gradient, "alpha gradient");
    const StateJet jet = state_jet(fam, lambda);
    const QGTResult base = qgt(jet);

    const Complex phase = std::exp(kImag * alpha_value);
    const StateVector psi_t = phase * jet.psi;
    std::vector<StateVector> dpsi_t;
    dpsi_t.reserve(jet.dpsi_dmu.size());
    for (std::size_t i = 0; i < jet.dpsi_dmu.size(); ++i) {
        const double da = alpha_gradient(static_cast<Eigen::Index>(i));
        dpsi_t.push_back(phase * (kImag * da * jet.psi + jet.dpsi_dmu[i]));
    }
    const QGTResult shifted = qgt(psi_t, dpsi_t);

    const ParamVector& b = base.beta;
    const ParamVector& a = alpha_gradient;
    const RealMatrix gamma_pred = base.gamma + b * a.transpose() + a * b.transpose() +
                                  a * a.transpose();

    GaugeReport report;
    report.gamma_prime = shifted.gamma;
    report.beta_prime = shifted.beta;
    report.g_prime = shifted.g;
    report.gamma_law_residual = shifted.gamma - gamma_pred;
    report.beta_law_residual = shifted.beta - (b + a);
    report.g_difference = shifted.g - base.g;
    report.max_error = std::max({report.gamma_law_residual.cwiseAbs().maxCoeff(),
                                 report.beta_law_residual.cwiseAbs().maxCoeff(),
                                 report.g_difference.cwiseAbs().maxCoeff()});
    report.ok = report.max_error <= tolerance;
    return report;
}

/// Christoffel symbols of the second kind; entry [a](b, c) is Gamma^a_{bc}.
using ChristoffelSymbols = std::vector<RealMatrix>;

/// Smallest eigenvalue of g below which the metric counts as singular.
inline constexpr double kSingularMetricThreshold = 1e-8;

inline void require_invertible_metric(const RealMatrix& g)
{
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (!(lo > kSingularMetricThreshold)) {
        std::ostringstream msg;
        msg << "metric is singular (min eigenvalue " << lo
            << "); a gauge-degenerate direction blocks the shooting solver";
        throw SingularMetricError(msg.str());
    }
}

/// Gamma^a_{bc} = 1/2 g^{ad}(d_b g_dc + d_c g_db - d_d g_bc), with dg[d] = d_d g.
inline ChristoffelSymbols christoffel_from_metric(const RealMatrix& g,
                                                  const std::vector<RealMatrix>& dg)
{
    require_invertible_metric(g);
    const auto m = g.rows();
    const RealMatrix ginv = g.inverse();
    ChristoffelSymbols lowered(static_cast<std::size_t>(m), RealMatrix::Zero(m, m));
    for (Eigen::Index d = 0; d < m; ++d) {
        for (Eigen::Index b = 0; b < m; ++b) {
            for (Eigen::Index c = 0; c < m; ++c) {
                lowered[static_cast<std::size_t>(d)](b, c) =
                    0.5 * (dg[static_cast<std::size_t>(b)](d, c) +
                           dg[static_cast<std::size_t>(c)](d, b) -
                           dg[static_cast<std::size_t>(d)](b, c));
            }
        }
    }
    ChristoffelSymbols out(static_cast<std::size_t>(m), RealMatrix::Zero(m, m));
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index d = 0; d < m; ++d) {
            out[static_cast<std::size_t>(a)] += ginv(a, d) * lowered[static_cast<std::size_t>(d)];
        }
    }
    return out;
}

/// Christoffel symbols with metric derivatives by central differences.
inline ChristoffelSymbols christoffel(const HamiltonianFamily& fam, const ParamVector& lambda,
                                      double step = 1e-4)
{
    check_param_length(fam, lambda, "lambda");
    const auto m = lambda.size();
    const RealMatrix g = qgt(fam, lambda).g;
    std::vector<RealMatrix> dg;
    dg.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index mu = 0; mu < m; ++mu) {
        ParamVector plus = lambda, minus = lambda;
        plus(mu) += step;
        minus(mu) -= step;
        dg.push_back((qgt(fam, plus).g - qgt(fam, minus).g) / (2.0 * step));
    }
    return christoffel_from_metric(g, dg);
}

} // namespace qaction
