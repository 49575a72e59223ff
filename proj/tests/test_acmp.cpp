#include <acmp/acmp.hpp>
#include <acmp/factorization.hpp>
#include <acmp/fock.hpp>
#include <acmp/serialize.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "oracle.hpp"

using namespace acmp;

namespace {

AcmpSet rotate(const AcmpSet& s, std::uint64_t seed) {
  auto q = [&](const Matrix& m, std::uint64_t k) { return Matrix(oracle::random_orthogonal(m.rows(), seed + k) * m); };
  const Acmp& d = s.d0();
  return AcmpSet(Acmp{q(d.A, 1), q(d.C, 2), d.N, d.tau}, q(s.child_a(), 3), q(s.child_c(), 4));
}

}  // namespace

TEST(SetShape, MinimalSizes) {
  const SetShape s = SetShape::minimal(5, 2);
  EXPECT_EQ(s.d0_a, 5);
  EXPECT_EQ(s.d0_c, 5);
  EXPECT_EQ(s.child_a, 1);
  EXPECT_EQ(s.child_c, 10);
  const SetShape t = SetShape::minimal(9, 8);
  EXPECT_EQ(t.d0_c, 1);
  EXPECT_EQ(t.child_a, 36);
  EXPECT_EQ(t.child_c, 9);
}

TEST(AcmpSet, PairIndexingAndSigns) {
  const int n = 5;
  int k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) EXPECT_EQ(AcmpSet::pair_index(i, j, n), k++);
  const Wavefunction psi = random_wavefunction(n, 3, 2);
  const AcmpSet set = acmp_set_from_wavefunction(psi);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      EXPECT_LT((set.a(i, j) - annihilate(j, annihilate(i, psi)).coeffs).norm(), 1e-15);
      EXPECT_LT((set.c(i, j) - create(j, annihilate(i, psi)).coeffs).norm(), 1e-15);
    }
  EXPECT_EQ(set.a(2, 2).norm(), 0.0);
  EXPECT_THROW(AcmpSet(set.d0(), set.child_a().leftCols(3), set.child_c()), DimensionError);
}

TEST(AcmpResiduals, VanishForWavefunctions) {
  for (int n = 3; n <= 6; ++n)
    for (int N = 2; N < n; ++N) {
      const AcmpSet set = acmp_set_from_wavefunction(random_wavefunction(n, N, n * 31 + N));
      EXPECT_LT(set_residuals(set).norms().max(), 1e-13) << n << ' ' << N;
      const AcmpResiduals r = acmp_residuals(set.d0());
      EXPECT_LT(r.identity.cwiseAbs().maxCoeff(), 1e-13);
      EXPECT_LT(std::abs(r.trace), 1e-13);
      for (int i = 0; i < n; ++i) EXPECT_LT(acmp_residuals(set.child(i)).identity.cwiseAbs().maxCoeff(), 1e-13);
    }
}

TEST(AcmpResiduals, DetectPerturbation) {
  const AcmpSet set = acmp_set_from_wavefunction(random_wavefunction(4, 2, 1));
  Matrix ca = set.child_a();
  ca(0, 0) += 1e-3;
  const ResidualNorms r = set_residuals(AcmpSet(set.d0(), ca, set.child_c())).norms();
  EXPECT_GT(r.child_identity, 1e-5);
  EXPECT_LT(r.d0_identity, 1e-15);
}

TEST(PairProduct, OverlapOfDifferentStates) {
  const Wavefunction a = random_wavefunction(5, 2, 1), b = random_wavefunction(5, 2, 2);
  const double s = a.coeffs.dot(b.coeffs);
  const Acmp da = acmp_from_wavefunction(a), db = acmp_from_wavefunction(b);
  EXPECT_LT((pair_product(da, db) - s * Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR((da.A.transpose() * db.A).trace(), 2.0 * s, 1e-14);
}

TEST(Rdm, FromSetMatchesOracle) {
  for (int n = 3; n <= 6; ++n) {
    const oracle::FockOps ops(n);
    for (int N = 2; N < n; ++N) {
      const Wavefunction psi = random_wavefunction(n, N, 500 + 10 * n + N);
      const AcmpSet set = acmp_set_from_wavefunction(psi);
      const Vector full = oracle::embed(psi);
      EXPECT_LT((rdm1_from(set) - oracle::rdm1(full, ops)).cwiseAbs().maxCoeff(), 1e-13);
      EXPECT_LT((rdm2_from(set) - oracle::rdm2(full, ops)).max_abs(), 1e-13);
      const Hamiltonian ham = random_hamiltonian(n, N);
      EXPECT_NEAR(energy_of(set, ham), oracle::contract(ham, oracle::rdm1(full, ops), oracle::rdm2(full, ops)),
                  1e-12);
    }
  }
}

TEST(Compaction, KeepsObservablesAndShrinksRows) {
  const Hamiltonian ham = random_hamiltonian(6, 3);
  const AcmpSet full = acmp_set_from_wavefunction(random_wavefunction(6, 3, 3));
  const AcmpSet small = compact(full);
  EXPECT_EQ(small.shape(), SetShape::minimal(6, 3));
  EXPECT_NEAR(energy_of(small, ham), energy_of(full, ham), 1e-12);
  EXPECT_LT((rdm2_from(small) - rdm2_from(full)).max_abs(), 1e-12);
  EXPECT_LT(set_residuals(small).norms().max(), 1e-12);
  const Acmp c = compact(full.d0());
  EXPECT_EQ(c.A.rows(), 6);
  EXPECT_LT((c.A.transpose() * c.A - full.d0().A.transpose() * full.d0().A).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Compaction, ThrowsWhenRowBudgetTooSmall) {
  const AcmpSet full = acmp_set_from_wavefunction(random_wavefunction(5, 2, 8));
  SetShape s = SetShape::minimal(5, 2);
  s.d0_a = 2;
  EXPECT_THROW(compact(full, s), RepresentabilityError);
}

TEST(Gauge, RotationsDoNotChangeObservables) {
  const Hamiltonian ham = random_hamiltonian(5, 12);
  const AcmpSet set = compact(acmp_set_from_wavefunction(random_wavefunction(5, 3, 12)));
  const AcmpSet r = rotate(set, 99);
  EXPECT_NEAR(energy_of(r, ham), energy_of(set, ham), 1e-12);
  EXPECT_LT((rdm2_from(r) - rdm2_from(set)).max_abs(), 1e-13);
  EXPECT_LT(set_residuals(r).norms().max(), 1e-12);
}

TEST(Coleman, PassesForStatesAndFailsOutsideHypercube) {
  const Acmp d = acmp_from_wavefunction(random_wavefunction(5, 2, 4));
  const ColemanReport r = coleman_check(d);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.occupation_sum, 2.0, 1e-12);
  for (Eigen::Index k = 0; k < r.occupations.size(); ++k)
    EXPECT_NEAR(r.hole_occupations(k), 1.0 - r.occupations(k), 1e-12);

  Acmp bad = d;
  bad.A *= 1.2;  // occupations scale past their bounds
  EXPECT_FALSE(coleman_check(bad).pass);
  bad.tau = 2.0;
  EXPECT_THROW(coleman_check(bad), Error);
}

TEST(ConvexMix, AveragesGramsAndKeepsConditions) {
  const Hamiltonian ham = random_hamiltonian(4, 0);
  const AcmpSet a = acmp_set_from_wavefunction(random_wavefunction(4, 2, 1));
  const AcmpSet b = acmp_set_from_wavefunction(random_wavefunction(4, 2, 2));
  const AcmpSet m = convex_mix({{a, 0.3}, {b, 0.7}});
  EXPECT_LT(set_residuals(m).norms().max(), 1e-12);
  EXPECT_NEAR(energy_of(m, ham), 0.3 * energy_of(a, ham) + 0.7 * energy_of(b, ham), 1e-12);
  const Matrix mix = 0.3 * rdm2_from(a).as_pair_matrix() + 0.7 * rdm2_from(b).as_pair_matrix();
  EXPECT_LT((rdm2_from(m).as_pair_matrix() - mix).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_THROW(convex_mix({{a, 0.5}, {b, 0.6}}), Error);
  EXPECT_THROW(convex_mix({{a, 1.0}, {acmp_set_from_wavefunction(random_wavefunction(4, 3, 1)), 0.0}}), Error);
}

TEST(PsdFactor, ReproducesGramAndRank) {
  Matrix x(3, 5);
  x << 1, 2, 3, 4, 5, 0, 1, 0, 1, 0, 2, 5, 6, 9, 10;  // third row = 2*first + second
  const Matrix g = x.transpose() * x;
  EXPECT_EQ(psd_rank(g), 2);
  const Matrix r = psd_factor(g);
  EXPECT_EQ(r.rows(), 2);
  EXPECT_LT((r.transpose() * r - g).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(psd_factor(g, 4).rows(), 4);
  EXPECT_THROW(psd_factor(g, 1), RepresentabilityError);
  Matrix neg = Matrix::Identity(3, 3);
  neg(2, 2) = -0.1;
  EXPECT_THROW(psd_factor(neg), RepresentabilityError);
}

TEST(Container, RoundTripIsBitExact) {
  const AcmpSet set = compact(acmp_set_from_wavefunction(random_wavefunction(5, 3, 6)));
  std::stringstream ss;
  write_set(ss, set);
  write_block(ss, "XTRA", Vector::LinSpaced(4, 0.1, 0.4));
  const AcmpSet back = read_set(ss);
  EXPECT_EQ(back.d0().A, set.d0().A);
  EXPECT_EQ(back.d0().C, set.d0().C);
  EXPECT_EQ(back.child_a(), set.child_a());
  EXPECT_EQ(back.child_c(), set.child_c());
  EXPECT_EQ(back.particles(), 3);
  EXPECT_EQ(read_block(ss, "XTRA"), Vector::LinSpaced(4, 0.1, 0.4));

  const auto path = std::filesystem::temp_directory_path() / "acmp_container_test.bin";
  save_set(set, path);
  EXPECT_EQ(load_set(path).child_c(), set.child_c());
  std::filesystem::remove(path);
}

TEST(Container, RejectsCorruptInput) {
  std::stringstream bad("NOTACMP!garbage");
  EXPECT_THROW(read_set(bad), ParseError);
  const AcmpSet set = acmp_set_from_wavefunction(random_wavefunction(3, 2, 0));
  std::stringstream ss;
  write_set(ss, set);
  std::string bytes = ss.str();
  bytes.resize(bytes.size() - 5);
  std::stringstream cut(bytes);
  EXPECT_THROW(read_set(cut), ParseError);
  std::stringstream empty;
  EXPECT_THROW(read_block(empty, "MULT"), ParseError);
}
