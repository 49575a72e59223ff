#include <acmp/fock.hpp>

#include <gtest/gtest.h>

#include "oracle.hpp"

using namespace acmp;

TEST(Determinant, PhaseCountsOccupiedOrbitalsAbove) {
  const Determinant d{0b1011, 4};  // orbitals 0, 1, 3
  const auto a0 = apply_annihilation(0, d);
  ASSERT_TRUE(a0);
  EXPECT_EQ(a0->det.occ, 0b1010u);
  EXPECT_EQ(a0->phase, 1);  // two occupied above
  const auto a1 = apply_annihilation(1, d);
  EXPECT_EQ(a1->phase, -1);
  EXPECT_FALSE(apply_annihilation(2, d));
  EXPECT_FALSE(apply_creation(3, d));
  const auto c2 = apply_creation(2, d);
  EXPECT_EQ(c2->det.occ, 0b1111u);
  EXPECT_EQ(c2->phase, -1);
  EXPECT_THROW(apply_annihilation(4, d), DimensionError);
  EXPECT_THROW(apply_creation(-1, d), DimensionError);
}

TEST(DeterminantBasis, AscendingAndComplete) {
  for (int n = 1; n <= 7; ++n)
    for (int N = 0; N <= n; ++N) {
      const DeterminantBasis b(n, N);
      const auto ref = oracle::sector(n, N);
      ASSERT_EQ(static_cast<std::size_t>(b.size()), ref.size());
      EXPECT_EQ(static_cast<std::size_t>(b.size()), binomial(n, N));
      for (int k = 0; k < b.size(); ++k) {
        EXPECT_EQ(b[k].occ, static_cast<std::uint64_t>(ref[static_cast<std::size_t>(k)]));
        EXPECT_EQ(b.index(b[k]), k);
      }
    }
  EXPECT_EQ(DeterminantBasis(4, 2).index(Determinant{0b0111, 4}), -1);
}

// {a_i, c+_j} = delta_ij and {a_i, a_j} = 0 applied to random states of every sector.
TEST(Operators, AnticommutatorsExhaustive) {
  for (int n = 2; n <= 5; ++n)
    for (int N = 1; N < n; ++N) {
      const Wavefunction psi = random_wavefunction(n, N, 100 + n * 10 + N);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const Vector ac = create(j, annihilate(i, psi)).coeffs + annihilate(i, create(j, psi)).coeffs;
          const Vector expect = i == j ? psi.coeffs : Vector::Zero(psi.coeffs.size());
          EXPECT_LT((ac - expect).cwiseAbs().maxCoeff(), 1e-14) << n << N << i << j;
          if (N >= 2) {
            const Vector aa = annihilate(j, annihilate(i, psi)).coeffs + annihilate(i, annihilate(j, psi)).coeffs;
            EXPECT_LT(aa.cwiseAbs().maxCoeff(), 1e-14);
          }
        }
    }
}

TEST(Operators, MatchJordanWignerMatrices) {
  const int n = 5;
  const oracle::FockOps ops(n);
  const Wavefunction psi = random_wavefunction(n, 3, 7);
  const Vector full = oracle::embed(psi);
  for (int i = 0; i < n; ++i) {
    EXPECT_LT((oracle::embed(annihilate(i, psi)) - ops.a[i] * full).norm(), 1e-14);
    EXPECT_LT((oracle::embed(create(i, psi)) - ops.cd[i] * full).norm(), 1e-14);
  }
}

TEST(HamiltonianMatrix, MatchesOperatorStringAssembly) {
  for (int n = 3; n <= 5; ++n) {
    const Hamiltonian ham = random_hamiltonian(n, 40 + n);
    const oracle::FockOps ops(n);
    const Matrix full = oracle::full_hamiltonian(ham, ops);
    for (int N = 0; N <= n; ++N) {
      const DeterminantBasis basis(n, N);
      const Matrix h = build_hamiltonian_matrix(ham, basis);
      const Matrix ref = oracle::restrict(full, oracle::sector(n, N));
      EXPECT_LT((h - ref).cwiseAbs().maxCoeff(), 1e-13) << n << ' ' << N;
      EXPECT_LT((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-13);
    }
  }
}

TEST(GroundState, MatchesJacobiOracle) {
  for (int n = 3; n <= 6; ++n) {
    const oracle::FockOps ops(n);
    for (int N = 1; N < n; ++N) {
      const Hamiltonian ham = random_hamiltonian(n, 7 * n + N);
      const GroundState gs = ground_state(ham, N);
      const oracle::Ground ref = oracle::ground(ham, N, ops);
      EXPECT_NEAR(gs.energy, ref.energy, 1e-11) << n << ' ' << N;
      EXPECT_NEAR(gs.psi.coeffs.norm(), 1.0, 1e-13);
      Eigen::Index big;
      gs.psi.coeffs.cwiseAbs().maxCoeff(&big);
      EXPECT_GT(gs.psi.coeffs(big), 0.0);
    }
  }
}

TEST(GroundState, DiagonalOneBody) {
  Hamiltonian ham(3);
  ham.h1.diagonal() << 1.0, 2.0, 3.0;
  EXPECT_NEAR(ground_state(ham, 2).energy, 3.0, 1e-14);
  EXPECT_NEAR(ground_state(ham, 0).energy, 0.0, 1e-14);
  EXPECT_NEAR(ground_state(ham, 3).energy, 6.0, 1e-14);
}

TEST(GroundState, GuardRejectsLargeSectors) { EXPECT_THROW(ground_state(Hamiltonian(20), 10), DimensionError); }

TEST(Rdm, MatchJordanWignerExpectations) {
  for (int n = 3; n <= 6; ++n) {
    const oracle::FockOps ops(n);
    for (int N = 1; N < n; ++N) {
      const Wavefunction psi = random_wavefunction(n, N, 300 + n * 10 + N);
      const Vector full = oracle::embed(psi);
      EXPECT_LT((rdm1_of(psi) - oracle::rdm1(full, ops)).cwiseAbs().maxCoeff(), 1e-13);
      EXPECT_LT((rdm2_of(psi) - oracle::rdm2(full, ops)).max_abs(), 1e-13);
      EXPECT_NEAR(rdm1_of(psi).trace(), N, 1e-12);
    }
  }
}

TEST(Rdm, ContractionGivesGroundEnergy) {
  const Hamiltonian ham = random_hamiltonian(5, 3);
  const GroundState gs = ground_state(ham, 3);
  EXPECT_NEAR(oracle::contract(ham, rdm1_of(gs.psi), rdm2_of(gs.psi)), gs.energy, 1e-12);
}

TEST(SlaterDeterminant, OneBodyEnergyIsSumOfOccupiedLevels) {
  Hamiltonian ham = random_hamiltonian(6, 11, 1.0, 0.0);
  Eigen::SelfAdjointEigenSolver<Matrix> es(ham.h1);
  const Wavefunction det = slater_determinant(es.eigenvectors().leftCols(3));
  EXPECT_NEAR(det.coeffs.norm(), 1.0, 1e-13);
  const Matrix g = rdm1_of(det);
  EXPECT_LT((g * g - g).cwiseAbs().maxCoeff(), 1e-13);  // idempotent
  EXPECT_NEAR(oracle::contract(ham, g, rdm2_of(det)), es.eigenvalues().head(3).sum(), 1e-12);
  EXPECT_NEAR(ground_state(ham, 3).energy, es.eigenvalues().head(3).sum(), 1e-12);
}

TEST(AcmpFromWavefunction, ColumnsAreOperatorImages) {
  const Wavefunction psi = random_wavefunction(5, 2, 1);
  const Acmp d = acmp_from_wavefunction(psi);
  EXPECT_EQ(d.A.rows(), static_cast<Eigen::Index>(binomial(5, 1)));
  EXPECT_EQ(d.C.rows(), static_cast<Eigen::Index>(binomial(5, 3)));
  for (int j = 0; j < 5; ++j) {
    EXPECT_LT((d.A.col(j) - annihilate(j, psi).coeffs).norm(), 1e-15);
    EXPECT_LT((d.C.col(j) - create(j, psi).coeffs).norm(), 1e-15);
  }
  EXPECT_THROW(acmp_from_wavefunction(random_wavefunction(3, 0, 0)), DimensionError);
  EXPECT_THROW(acmp_from_wavefunction(random_wavefunction(3, 3, 0)), DimensionError);
  EXPECT_THROW(acmp_set_from_wavefunction(random_wavefunction(3, 1, 0)), DimensionError);
}
