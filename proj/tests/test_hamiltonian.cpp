#include <acmp/fock.hpp>
#include <acmp/hamiltonian.hpp>

#include <gtest/gtest.h>

#include <sstream>

#include "oracle.hpp"

using namespace acmp;

namespace {

bool has_kind(const std::vector<Violation>& v, const std::string& kind) {
  for (const auto& x : v)
    if (x.kind == kind) return true;
  return false;
}

std::string parse_error(const std::string& text) {
  std::istringstream is(text);
  try {
    read_hamiltonian(is);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(RandomHamiltonian, SymmetricAndDeterministic) {
  const Hamiltonian a = random_hamiltonian(5, 9);
  EXPECT_TRUE(validate_hamiltonian(a).empty());
  EXPECT_EQ(a, random_hamiltonian(5, 9));
  EXPECT_FALSE(a == random_hamiltonian(5, 10));
  EXPECT_LE(a.h1.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_EQ(random_hamiltonian(4, 1, 1.0, 0.0).h2.max_abs(), 0.0);
}

TEST(Validate, ReportsEachKind) {
  Hamiltonian h = random_hamiltonian(4, 2);
  h.h1(0, 1) += 1e-3;
  EXPECT_TRUE(has_kind(validate_hamiltonian(h), "h1-symmetry"));

  h = random_hamiltonian(4, 2);
  h.h2(0, 1, 2, 3) += 1e-3;
  const auto v = validate_hamiltonian(h);
  EXPECT_TRUE(has_kind(v, "hermiticity"));
  EXPECT_TRUE(has_kind(v, "pair-swap"));

  h = random_hamiltonian(4, 2);
  h.h1(2, 2) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_TRUE(has_kind(validate_hamiltonian(h), "non-finite"));

  h = random_hamiltonian(4, 2);
  h.h1 = Matrix::Zero(3, 3);
  EXPECT_TRUE(has_kind(validate_hamiltonian(h), "shape"));
}

TEST(HamiltonianFile, RoundTripIsBitExact) {
  const Hamiltonian a = random_hamiltonian(4, 21);
  std::stringstream ss;
  write_hamiltonian(ss, a);
  const std::string first = ss.str();
  const Hamiltonian b = read_hamiltonian(ss);
  EXPECT_EQ(a, b);
  std::stringstream again;
  write_hamiltonian(again, b);
  EXPECT_EQ(first, again.str());
}

TEST(HamiltonianFile, SymmetryCompletionFillsPartners) {
  std::istringstream is("ACMPH v1\nn 3\nh1 1 2 0.5\nh2 1 2 3 1 0.25  # one orbit member\n");
  const Hamiltonian h = read_hamiltonian(is);
  EXPECT_EQ(h.h1(1, 0), 0.5);
  EXPECT_EQ(h.h2(1, 0, 0, 2), 0.25);
  EXPECT_EQ(h.h2(2, 0, 0, 1), 0.25);
  EXPECT_EQ(h.h2(0, 2, 1, 0), 0.25);
}

TEST(HamiltonianFile, ErrorsCarryLineNumbers) {
  EXPECT_NE(parse_error("ACMPH v2\nn 2\n").find("line 1"), std::string::npos);
  EXPECT_NE(parse_error("ACMPH v1\nn x\n").find("line 2"), std::string::npos);
  EXPECT_NE(parse_error("ACMPH v1\nn 2\nh1 1 3 1.0\n").find("line 3"), std::string::npos);
  EXPECT_NE(parse_error("ACMPH v1\nn 2\n\nh1 1 1 abc\n").find("line 4"), std::string::npos);
  EXPECT_NE(parse_error("ACMPH v1\nn 2\nh3 1 1 1\n").find("unknown record"), std::string::npos);
  EXPECT_NE(parse_error("ACMPH v1\nn 2\nh1 1 2 1\nh1 2 1 2\n").find("h1-symmetry"), std::string::npos);
  EXPECT_NE(parse_error("").find("empty"), std::string::npos);
}

TEST(Embedding, PreservesSectorEnergiesAgainstOracle) {
  for (int n = 3; n <= 5; ++n) {
    const oracle::FockOps ops(n);
    const Hamiltonian ham = random_hamiltonian(n, 60 + n);
    for (int N = 2; N < n; ++N) {
      const Hamiltonian emb = embed_one_body(ham, N);
      EXPECT_TRUE(validate_hamiltonian(emb).empty());
      const auto idx = oracle::sector(n, N);
      const Matrix a = oracle::restrict(oracle::full_hamiltonian(ham, ops), idx);
      const Matrix b = oracle::restrict(oracle::full_hamiltonian(emb, ops), idx);
      // The whole sector block is unchanged, not just the ground energy.
      EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-13) << n << ' ' << N;
    }
  }
}

TEST(Embedding, FoldsTraceIntoOneBody) {
  const Hamiltonian ham = random_hamiltonian(4, 5);
  const Hamiltonian emb = embed_one_body(ham, 2);
  Matrix g = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int ip = 0; ip < 4; ++ip)
      for (int j = 0; j < 4; ++j) g(i, ip) += ham.h2(i, ip, j, j) / 8.0;
  EXPECT_LT((emb.h1 - ham.h1 - g).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ScaledTwoBody, ScalesOnlyTheTwoBodyPart) {
  const Hamiltonian ham = random_hamiltonian(3, 4);
  const Hamiltonian s = ham.scaled_two_body(0.0);
  EXPECT_EQ(s.h1, ham.h1);
  EXPECT_EQ(s.h2.max_abs(), 0.0);
}
