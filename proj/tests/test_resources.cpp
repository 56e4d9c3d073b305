// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace qaction;

namespace {

const Bipartition& first_qubit()
{
    static const Bipartition split(HilbertFactorization::qubits(2), {0});
    return split;
}

ComplexMatrix bell()
{
    StateVector v = StateVector::Zero(4);
    v(0) = v(3) = 1.0 / std::sqrt(2.0);
    return density(v);
}

ComplexMatrix example_rho(double t, double p) { return density(oracle::two_qubit_state(t, p)); }

PotentialSpec spec_of(PotentialKind kind)
{
    return oracle::two_qubit_problem(kind).potential;
}

} // namespace

TEST(Bipartition, ValidatesAndSorts)
{
    const auto fact = HilbertFactorization::qubits(3);
    EXPECT_THROW(Bipartition(fact, {}), FactorizationError);
    EXPECT_THROW(Bipartition(fact, {0, 1, 2}), FactorizationError);
    EXPECT_THROW(Bipartition(fact, {1, 1}), FactorizationError);
    EXPECT_THROW(Bipartition(fact, {3}), FactorizationError);
    const Bipartition b(fact, {2, 0});
    EXPECT_EQ(b.subsystems(), (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(b.dim_x(), 4u);
    EXPECT_EQ(b.dim_y(), 2u);
    EXPECT_EQ(b.complement().subsystems(), (std::vector<std::size_t>{1}));
}

TEST(Entanglement, SeparableReferenceStateIsZero)
{
    EXPECT_NEAR(entanglement(example_rho(0, 0), first_qubit()), 0.0, 1e-15);
}

TEST(Entanglement, BellStateIsOneHalf)
{
    EXPECT_NEAR(entanglement(bell(), first_qubit()), 0.5, 1e-15);
}

TEST(Entanglement, ExamplePointMatchesClosedForm)
{
    EXPECT_NEAR(entanglement(example_rho(oracle::pi / 8, oracle::pi / 4), first_qubit()), 0.25, 1e-14);
}

TEST(Entanglement, SymmetricUnderComplementForPureStates)
{
    std::mt19937_64 rng(31);
    const Bipartition split(HilbertFactorization({2, 3}), {0});
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix rho = density(oracle::random_state(rng, 6));
        EXPECT_NEAR(entanglement(rho, split), entanglement(rho, split.complement()), 1e-13);
    }
}

TEST(Antiflatness, ProductAndBellStatesAreFlat)
{
    std::mt19937_64 rng(32);
    const StateVector prod = kron(oracle::random_state(rng, 2), oracle::random_state(rng, 2));
    EXPECT_NEAR(antiflatness(density(prod), first_qubit()), 0.0, 1e-14);
    EXPECT_NEAR(antiflatness(bell(), first_qubit()), 0.0, 1e-15);
}

TEST(Antiflatness, ExamplePointMatchesClosedForm)
{
    const double t = oracle::pi / 8, p = oracle::pi / 8;
    EXPECT_NEAR(antiflatness(example_rho(t, p), first_qubit()), oracle::two_qubit_F(t, p), 1e-14);
}

TEST(Antiflatness, MatchesSpectrumFormula)
{
    // For a reduced spectrum {l_k}: sum l^3 - (sum l^2)^2.
    std::mt19937_64 rng(33);
    const Bipartition split(HilbertFactorization({3, 3}), {1});
    const ComplexMatrix rho = density(oracle::random_state(rng, 9));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(split.reduce(rho));
    const Eigen::VectorXd l = es.eigenvalues();
    const double expected = l.array().cube().sum() - std::pow(l.array().square().sum(), 2);
    EXPECT_NEAR(antiflatness(rho, split), expected, 1e-14);
}

TEST(Coherence, ComputationalStateIsIncoherent)
{
    StateVector v = StateVector::Zero(4);
    v(0) = 1.0;
    EXPECT_NEAR(coherence(density(v), ProjectorBasis::computational(4)), 0.0, 1e-15);
}

TEST(Coherence, ExamplePoints)
{
    const auto basis = ProjectorBasis::computational(4);
    EXPECT_NEAR(coherence(example_rho(0, 0.4), basis), 0.5, 1e-14);
    EXPECT_NEAR(coherence(example_rho(oracle::pi / 4, 1.1), basis), 0.75, 1e-14);
}

TEST(Coherence, EqualsSquaredOffDiagonalNorm)
{
    std::mt19937_64 rng(34);
    const ComplexMatrix rho = density(oracle::random_state(rng, 5));
    const ComplexMatrix off = rho - ComplexMatrix(rho.diagonal().asDiagonal());
    EXPECT_NEAR(coherence(rho, ProjectorBasis::computational(5)), off.squaredNorm(), 1e-14);
}

TEST(Resources, RejectMixedInput)
{
    const ComplexMatrix mixed = ComplexMatrix::Identity(4, 4) / 4.0;
    EXPECT_THROW(entanglement(mixed, first_qubit()), DimensionError);
    EXPECT_THROW(coherence(mixed, ProjectorBasis::computational(4)), DimensionError);
}

TEST(PotentialSpec, RequiresTheDataItsKindNeeds)
{
    PotentialSpec spec;
    spec.kind = PotentialKind::entanglement;
    EXPECT_THROW(spec.validate(), FactorizationError);
    spec.kind = PotentialKind::coherence;
    EXPECT_THROW(spec.validate(), BasisError);
    spec.kind = PotentialKind::none;
    EXPECT_NO_THROW(spec.validate());
}

TEST(PotentialKind, ParsesAndPrints)
{
    for (auto k : {PotentialKind::entanglement, PotentialKind::antiflatness, PotentialKind::coherence,
                   PotentialKind::none}) {
        EXPECT_EQ(parse_potential_kind(to_string(k)), k);
    }
    EXPECT_FALSE(parse_potential_kind("magic").has_value());
}

TEST(PotentialValue, DispatchesOnKind)
{
    const ComplexMatrix rho = example_rho(oracle::pi / 6, 0.3);
    EXPECT_EQ(potential_value(rho, spec_of(PotentialKind::none)), 0.0);
    EXPECT_NEAR(potential_value(bell(), spec_of(PotentialKind::entanglement)), 0.5, 1e-15);
    EXPECT_NEAR(potential_value(rho, spec_of(PotentialKind::coherence)), 11.0 / 16.0, 1e-14);
}

TEST(PotentialGradient, MatchesHandDifferentiatedIntegrands)
{
    const auto fam = oracle::two_qubit_family();
    for (int cell = 0; cell < 400; ++cell) {
        const double t = -1.5 + 3.1 * (cell / 20) / 19.0, p = -3.0 + 6.2 * (cell % 20) / 19.0;
        const ParamVector l = (ParamVector(2) << t, p).finished();
        EXPECT_LT((potential_gradient(fam, l, spec_of(PotentialKind::entanglement)) -
                   oracle::two_qubit_grad_E(t, p)).cwiseAbs().maxCoeff(), 1e-6);
        EXPECT_LT((potential_gradient(fam, l, spec_of(PotentialKind::antiflatness)) -
                   oracle::two_qubit_grad_F(t, p)).cwiseAbs().maxCoeff(), 1e-6);
        EXPECT_LT((potential_gradient(fam, l, spec_of(PotentialKind::coherence)) -
                   oracle::two_qubit_grad_Q(t, p)).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(PotentialGradient, StationaryAndKnownPoints)
{
    const auto fam = oracle::two_qubit_family();
    const auto e = spec_of(PotentialKind::entanglement);
    const ParamVector quarter = (ParamVector(2) << oracle::pi / 4, oracle::pi / 4).finished();
    EXPECT_LT(potential_gradient(fam, quarter, e).cwiseAbs().maxCoeff(), 1e-9);
    const ParamVector eighth = (ParamVector(2) << oracle::pi / 8, oracle::pi / 4).finished();
    EXPECT_NEAR(potential_gradient(fam, eighth, e)(0), 1.0, 1e-8);
    const ParamVector any = (ParamVector(2) << 0.3, 1.7).finished();
    EXPECT_NEAR(potential_gradient(fam, any, spec_of(PotentialKind::coherence))(1), 0.0, 1e-9);
}
