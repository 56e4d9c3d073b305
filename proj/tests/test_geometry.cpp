// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace qaction;

namespace {

HamiltonianFamily single_qubit(const ComplexMatrix& generator)
{
    StateVector zero = StateVector::Zero(2);
    zero(0) = 1.0;
    return {{generator}, zero, HilbertFactorization::qubits(1)};
}

double max_abs(const RealMatrix& a) { return a.cwiseAbs().maxCoeff(); }

} // namespace

TEST(QGT, ExampleFamilyIsFlat)
{
    const auto fam = oracle::two_qubit_family();
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const ParamVector l = oracle::random_params(rng, 2, 2.0);
        EXPECT_LT(max_abs(qgt(fam, l).g - RealMatrix::Identity(2, 2)), 1e-13);
    }
}

TEST(QGT, EigenstateEvolutionIsPureGauge)
{
    const auto r = qgt(single_qubit(pauli('Z')), ParamVector::Constant(1, 0.7));
    EXPECT_NEAR(r.g(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(r.gamma(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(r.beta(0), 1.0, 1e-15);
}

TEST(QGT, RotationOffTheAxisHasUnitMetric)
{
    const auto r = qgt(single_qubit(pauli('X')), ParamVector::Constant(1, 0.4));
    EXPECT_NEAR(r.g(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(r.gamma(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(r.beta(0), 0.0, 1e-14);
}

TEST(QGT, StructuralInvariantsOnRandomFamilies)
{
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 30; ++trial) {
        const auto fam = oracle::random_family(rng, 3);
        const auto r = qgt(fam, oracle::random_params(rng, 3));
        EXPECT_LT(max_abs(r.g - (r.gamma - r.beta * r.beta.transpose())), 1e-12);
        EXPECT_LT(max_abs(r.g - r.g.transpose()), 1e-14);
        EXPECT_LT(max_abs(r.sigma + r.sigma.transpose()), 1e-14);
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(r.g);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    }
}

TEST(QGT, MatchesFidelityMetric)
{
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        const auto fam = oracle::random_family(rng, 2);
        const ParamVector l = oracle::random_params(rng, 2);
        const auto state = [&](const ParamVector& x) { return evolve(fam, x); };
        EXPECT_LT(max_abs(qgt(fam, l).g - oracle::fidelity_metric(state, l)), 1e-6);
    }
}

TEST(QGT, MatchesMetricBuiltFromEigenbasisDerivatives)
{
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        const auto fam = oracle::random_family(rng, 3);
        const ParamVector l = oracle::random_params(rng, 3);
        const ComplexMatrix h = hamiltonian_at(fam, l);
        std::vector<StateVector> dpsi;
        for (const auto& g : fam.generators()) {
            dpsi.push_back(oracle::frechet_daleckii_krein(h, g) * fam.reference_state());
        }
        const StateVector psi = oracle::expm_taylor(kImag * h) * fam.reference_state();
        EXPECT_LT(max_abs(qgt(fam, l).g - oracle::metric_from_derivatives(psi, dpsi)), 1e-11);
    }
}

TEST(FSSpeed, ExampleFamilyGivesEuclideanSpeed)
{
    const auto fam = oracle::two_qubit_family();
    const ParamVector l = (ParamVector(2) << 0.2, 1.3).finished();
    EXPECT_NEAR(fs_speed_squared(state_jet(fam, l, (ParamVector(2) << 1, 2).finished())), 5.0, 1e-12);
    EXPECT_NEAR(fs_speed(state_jet(fam, l, (ParamVector(2) << 3, 4).finished())), 5.0, 1e-12);
    EXPECT_EQ(fs_speed_squared(state_jet(fam, l)), 0.0);
}

TEST(FSSpeed, EqualsMetricQuadraticForm)
{
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 30; ++trial) {
        const auto fam = oracle::random_family(rng, 3);
        const ParamVector l = oracle::random_params(rng, 3);
        const ParamVector v = oracle::random_params(rng, 3);
        const StateJet jet = state_jet(fam, l, v);
        EXPECT_NEAR(fs_speed_squared(jet), v.dot(qgt(jet).g * v), 1e-10);
        EXPECT_NEAR(fs_speed(jet) * fs_speed(jet), fs_speed_squared(jet), 1e-12);
    }
}

TEST(Gauge, ZeroAndConstantPhasesChangeNothing)
{
    const auto fam = oracle::two_qubit_family();
    const ParamVector l = (ParamVector(2) << 0.3, -0.8).finished();
    const auto base = qgt(fam, l);
    for (double c : {0.0, 1.234}) {
        const auto report = gauge_transform_check(fam, l, c, ParamVector::Zero(2));
        EXPECT_TRUE(report.ok);
        EXPECT_LT(max_abs(report.gamma_prime - base.gamma), 1e-14);
        EXPECT_LT((report.beta_prime - base.beta).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Gauge, LinearPhaseOnExampleFamily)
{
    const auto fam = oracle::two_qubit_family();
    const ParamVector l = (ParamVector(2) << 0.6, 2.1).finished();
    const ParamVector grad = (ParamVector(2) << 0.3, 0.7).finished();
    const auto report = gauge_transform_check(fam, l, 0.3 * l(0) + 0.7 * l(1), grad);
    EXPECT_TRUE(report.ok) << report.max_error;
    EXPECT_LT(max_abs(report.g_prime - RealMatrix::Identity(2, 2)), 1e-8);
}

TEST(Gauge, PhasedFamilyRecomputedFromScratch)
{
    // exp(i(c + k.lambda)) psi(lambda) is itself a linear family with
    // generators G_mu + k_mu I and reference exp(ic) Omega.
    std::mt19937_64 rng(46);
    for (int trial = 0; trial < 10; ++trial) {
        const auto fam = oracle::random_family(rng, 2);
        const ParamVector k = oracle::random_params(rng, 2);
        const double c = 0.9;
        std::vector<ComplexMatrix> gens;
        for (std::size_t mu = 0; mu < 2; ++mu) {
            gens.push_back(fam.generators()[mu] +
                           k(static_cast<Eigen::Index>(mu)) * ComplexMatrix::Identity(fam.dim(), fam.dim()));
        }
        const HamiltonianFamily phased(gens, std::exp(Complex(0, c)) * fam.reference_state(),
                                       fam.factorization());
        const ParamVector l = oracle::random_params(rng, 2);
        const auto base = qgt(fam, l);
        const auto moved = qgt(phased, l);
        const auto report = gauge_transform_check(fam, l, c + k.dot(l), k);
        EXPECT_LT(max_abs(moved.gamma - report.gamma_prime), 1e-12);
        EXPECT_LT((moved.beta - report.beta_prime).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT(max_abs(moved.g - base.g), 1e-12);
        EXPECT_TRUE(report.ok);
    }
}

TEST(Christoffel, VanishOnFlatExampleFamily)
{
    const auto gamma = christoffel(oracle::two_qubit_family(), (ParamVector(2) << 0.4, 1.9).finished());
    for (const auto& g : gamma) EXPECT_LT(max_abs(g), 1e-8);
}

TEST(Christoffel, MatchTextbookFormulaOnFidelityMetric)
{
    // Every one-parameter linear family has a constant metric (the variance
    // of the generator is conserved), so the curved check needs two.
    const auto fam = oracle::qubit_family();
    const auto state = [&](const ParamVector& x) { return evolve(fam, x); };
    const auto metric = [&](const ParamVector& x) { return oracle::fidelity_metric(state, x, 1e-3); };
    for (const ParamVector& l : {(ParamVector(2) << 0.5, 0.2).finished(),
                                 (ParamVector(2) << 0.9, -0.6).finished(),
                                 (ParamVector(2) << -0.7, 1.1).finished()}) {
        const auto lib = christoffel(fam, l);
        const auto ref = oracle::christoffel_textbook(metric, l, 1e-2);
        for (std::size_t a = 0; a < 2; ++a) {
            EXPECT_LT(max_abs(lib[a] - ref[a]), 1e-3) << "a = " << a;
        }
        EXPECT_GT(max_abs(lib[0]) + max_abs(lib[1]), 1e-2); // genuinely curved
    }
}

TEST(Christoffel, ConstantMetricFromDerivativesIsZero)
{
    const RealMatrix g = (RealMatrix(2, 2) << 2.0, 0.3, 0.3, 1.0).finished();
    const auto gamma = christoffel_from_metric(g, {RealMatrix::Zero(2, 2), RealMatrix::Zero(2, 2)});
    for (const auto& m : gamma) EXPECT_EQ(max_abs(m), 0.0);
}

TEST(Christoffel, SingularMetricIsReported)
{
    // On the line a = 0 the family H = aX + bZ moves |0> only by a phase in b.
    EXPECT_THROW(christoffel(oracle::qubit_family(), (ParamVector(2) << 0.0, 0.5).finished()),
                 SingularMetricError);
}
