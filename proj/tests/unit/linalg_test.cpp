#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "demeasure/error.hpp"
#include "demeasure/linalg.hpp"
#include "demeasure/random.hpp"
#include "instances.hpp"
#include "oracles.hpp"

using namespace demeasure;

class LinalgTest : public ::testing::Test {
 protected:
  ComplexMatrix p0 = ComplexMatrix::from_rows({{1, 0}, {0, 0}});
  ComplexMatrix p1 = ComplexMatrix::from_rows({{0, 0}, {0, 1}});
  ComplexMatrix x = ComplexMatrix::from_rows({{0, 1}, {1, 0}});
};

TEST_F(LinalgTest, CanonicalCompletionOfFirstBasisColumnIsIdentity) {
  const auto u = complete_to_unitary(ComplexMatrix::basis(2, 0), Completion::canonical());
  EXPECT_EQ(matrix_distance(u.matrix(), ComplexMatrix::identity(2)), 0.0);
  const auto seeded = complete_to_unitary(ComplexMatrix::basis(2, 0), Completion::seeded(5));
  EXPECT_EQ(seeded.matrix()(0, 0), Complex(1.0));
  EXPECT_EQ(seeded.matrix()(1, 0), Complex(0.0));
}

TEST_F(LinalgTest, ProjectiveStackingActsAsCnotOnAncillaZero) {
  // column j = sum_n A_n|j> (x) |n>
  ComplexMatrix iso(4, 2);
  for (std::size_t j = 0; j < 2; ++j) {
    const ComplexMatrix col = kron(p0 * ComplexMatrix::basis(2, j), ComplexMatrix::basis(2, 0)) +
                              kron(p1 * ComplexMatrix::basis(2, j), ComplexMatrix::basis(2, 1));
    iso.set_block(0, j, col);
  }
  const auto u = complete_columns(4, {{0, iso.col(0)}, {2, iso.col(1)}}, Completion::seeded(3));
  const ComplexMatrix cnot = *ir::named_gate_matrix("CNOT");
  for (std::size_t j : {0, 2}) EXPECT_LT(matrix_distance(u.matrix().col(j), cnot.col(j)), 1e-15);
  EXPECT_LT(unitarity_defect(u.matrix()), 1e-12);
}

TEST_F(LinalgTest, RandomIsometriesCompleteToUnitaries) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const ComplexMatrix iso = random_unitary(8, seed).matrix().block(0, 0, 8, 3);
    const auto u = complete_to_unitary(iso, Completion::seeded(seed + 1));
    EXPECT_LT(unitarity_defect(u.matrix()), 1e-12) << seed;
    EXPECT_EQ(u.matrix().block(0, 0, 8, 3), iso) << seed;
  }
}

TEST_F(LinalgTest, CompletionIsIdempotentOnUnitaries) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ComplexMatrix u = random_unitary(4, seed).matrix();
    EXPECT_EQ(complete_to_unitary(u, Completion::seeded(9)).matrix(), u);
  }
}

TEST_F(LinalgTest, CompletionIsDeterministicPerSeed) {
  const ComplexMatrix iso = random_unitary(6, 4).matrix().block(0, 0, 6, 2);
  EXPECT_EQ(complete_to_unitary(iso, Completion::seeded(11)).matrix(),
            complete_to_unitary(iso, Completion::seeded(11)).matrix());
  EXPECT_GT(matrix_distance(complete_to_unitary(iso, Completion::seeded(11)).matrix(),
                            complete_to_unitary(iso, Completion::seeded(12)).matrix()),
            1e-3);
}

TEST_F(LinalgTest, CompletionRejectsNonOrthonormalColumns) {
  ComplexMatrix bad(2, 2);
  bad(0, 0) = 1.0;
  bad(0, 1) = 1.0;
  EXPECT_THROW(complete_to_unitary(bad, Completion::canonical()), InvariantError);
  EXPECT_THROW(complete_to_unitary(ComplexMatrix(2, 3), Completion::canonical()), DimensionError);
}

TEST_F(LinalgTest, RandomUnitariesAreUnitary) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_LT(unitarity_defect(random_unitary(8, seed).matrix()), 1e-12);
  }
  EXPECT_THROW(UnitaryMatrix::checked(ComplexMatrix::from_rows({{1, 1}, {0, 1}})), InvariantError);
}

TEST_F(LinalgTest, PartialTraceOfProductKeepsFactor) {
  const ComplexMatrix rho = random_density(3, 7);
  const ComplexMatrix sigma = kron(rho, p0);
  EXPECT_LT(matrix_distance(partial_trace(sigma, 3, 2, Subsystem::A), rho), 1e-15);
  EXPECT_LT(matrix_distance(partial_trace(sigma, 3, 2, Subsystem::B), p0), 1e-15);
}

TEST_F(LinalgTest, PartialTraceOfBellStateIsMaximallyMixed) {
  const double r = 1.0 / std::numbers::sqrt2;
  const ComplexMatrix bell = ComplexMatrix::column(std::vector<Complex>{r, 0, 0, r});
  const ComplexMatrix rho = bell * bell.adjoint();
  EXPECT_LT(matrix_distance(partial_trace(rho, 2, 2, Subsystem::A), 0.5 * ComplexMatrix::identity(2)), 1e-15);
}

TEST_F(LinalgTest, PartialTraceOfDilatedProjectiveStateIsMeasurementChannel) {
  const ComplexMatrix rho = random_density(2, 21);
  const std::vector<ComplexMatrix> a{p0, p1};
  ComplexMatrix sigma(4, 4);
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t m = 0; m < 2; ++m)
      sigma += kron(a[n] * rho * a[m].adjoint(), ComplexMatrix::basis(2, n) * ComplexMatrix::basis(2, m).adjoint());
  EXPECT_LT(matrix_distance(partial_trace(sigma, 2, 2, Subsystem::A), demeasure::testing::oracle::apply_kraus(a, rho)), 1e-15);
}

TEST_F(LinalgTest, PartialTraceIsLinear) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ComplexMatrix r1 = random_density(6, seed);
    const ComplexMatrix r2 = random_density(6, seed + 100);
    const Complex alpha(0.3, -0.2);
    const Complex beta(1.7, 0.4);
    for (Subsystem keep : {Subsystem::A, Subsystem::B}) {
      const ComplexMatrix lhs = partial_trace(alpha * r1 + beta * r2, 2, 3, keep);
      const ComplexMatrix rhs = alpha * partial_trace(r1, 2, 3, keep) + beta * partial_trace(r2, 2, 3, keep);
      EXPECT_LT(matrix_distance(lhs, rhs), 1e-12);
    }
  }
}

TEST_F(LinalgTest, PartialTraceRejectsDimensionMismatch) {
  EXPECT_THROW(partial_trace(ComplexMatrix::identity(6), 4, 2, Subsystem::A), DimensionError);
}

TEST_F(LinalgTest, ReduceQubitsMatchesPartialTrace) {
  const ComplexMatrix rho = random_density(8, 5);
  const std::vector<std::size_t> first{0};
  const std::vector<std::size_t> last{1, 2};
  EXPECT_LT(matrix_distance(reduce_qubits(rho, 3, first), partial_trace(rho, 2, 4, Subsystem::A)), 1e-15);
  EXPECT_LT(matrix_distance(reduce_qubits(rho, 3, last), partial_trace(rho, 2, 4, Subsystem::B)), 1e-15);
}

TEST_F(LinalgTest, PermuteQubitsSwapsFactors) {
  const ComplexMatrix a = random_density(2, 1);
  const ComplexMatrix b = random_density(2, 2);
  const std::vector<std::size_t> order{1, 0};
  EXPECT_LT(matrix_distance(permute_qubits(kron(a, b), 2, order), kron(b, a)), 1e-15);
}

TEST_F(LinalgTest, DistanceExamples) {
  EXPECT_EQ(matrix_distance(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), 0.0);
  EXPECT_EQ(matrix_distance(ComplexMatrix::identity(2), x), 1.0);
  const ComplexMatrix u = random_unitary(4, 8).matrix();
  const ComplexMatrix e = random_unitary(4, 9).matrix();
  double emax = 0.0;
  for (const Complex& z : e.data()) emax = std::max(emax, std::abs(z));
  EXPECT_LE(matrix_distance(u, u + Complex(1e-12) * e), 1e-12 * emax * (1 + 1e-3));
  EXPECT_THROW(matrix_distance(ComplexMatrix::identity(2), ComplexMatrix::identity(3)), DimensionError);
}

TEST_F(LinalgTest, HermitianEigenvaluesAscending) {
  const ComplexMatrix d = ComplexMatrix::diagonal(std::vector<Complex>{0.5, 0.2, 0.3});
  const ComplexMatrix u = random_unitary(3, 4).matrix();
  const auto ev = hermitian_eigenvalues(u * d * u.adjoint());
  ASSERT_EQ(ev.size(), 3U);
  EXPECT_NEAR(ev[0], 0.2, 1e-12);
  EXPECT_NEAR(ev[1], 0.3, 1e-12);
  EXPECT_NEAR(ev[2], 0.5, 1e-12);
}

TEST_F(LinalgTest, RandomDensityIsAState) {
  const ComplexMatrix rho = random_density(4, 3);
  EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
  EXPECT_LT(hermiticity_defect(rho), 1e-15);
  EXPECT_GE(hermitian_eigenvalues(rho).front(), -1e-12);
}
