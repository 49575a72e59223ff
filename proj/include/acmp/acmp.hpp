#pragma once

#include <utility>
#include <vector>

#include "acmp/hamiltonian.hpp"
#include "acmp/types.hpp"

namespace acmp {

/// Anti-commutation matrix pair. Column j of `A` holds a_j|psi> and column j
/// of `C` holds c+_j|psi>, each expanded in some orthonormal frame of the
/// N-1 and N+1 particle sectors. Only scalar products between columns are
/// observable, so any row count at least the rank is admissible.
struct Acmp {
  Matrix A;
  Matrix C;
  int N = 0;
  double tau = 1.0;

  int n() const { return static_cast<int>(A.cols()); }
};

/// Row budgets of an AcmpSet.
struct SetShape {
  int d0_a = 0;
  int d0_c = 0;
  int child_a = 0;
  int child_c = 0;

  /// Smallest sizes that can hold an exact state in sector (n, N):
  /// min(n, C(n,N-1)), min(n, C(n,N+1)), min(C(n,2), C(n,N-2)), min(n^2, C(n,N)).
  static SetShape minimal(int n, int N);
  bool operator==(const SetShape&) const = default;
};

/// D0 plus the n child pairs D^i that represent a_i|psi>.
///
/// Child columns a^i_j (= a_j a_i|psi>) are stored once per pair i < j, in
/// the order (0,1), (0,2), ..., (n-2,n-1); a^j_i = -a^i_j and a^i_i = 0 are
/// synthesized on access. Child columns c^i_j (= c+_j a_i|psi>) are all
/// stored, column index i*n + j.
class AcmpSet {
 public:
  AcmpSet() = default;
  AcmpSet(Acmp d0, Matrix child_a, Matrix child_c);

  int n() const { return d0_.n(); }
  int particles() const { return d0_.N; }
  int pair_count() const { return static_cast<int>(child_a_.cols()); }
  SetShape shape() const;

  const Acmp& d0() const { return d0_; }
  const Matrix& child_a() const { return child_a_; }
  const Matrix& child_c() const { return child_c_; }

  static int pair_index(int i, int j, int n) { return i * n - i * (i + 1) / 2 + (j - i - 1); }

  /// Signed column a^i_j.
  Vector a(int i, int j) const;
  Matrix::ConstColXpr c(int i, int j) const { return child_c_.col(i * n() + j); }

  /// All n^2 columns a^i_j, column index i*n + j, signs expanded.
  Matrix a_full() const;

  /// The pair D^i with tau = Gamma_ii.
  Acmp child(int i) const;

 private:
  Acmp d0_;
  Matrix child_a_;
  Matrix child_c_;
};

/// Overlaps of the child columns: S_A over pairs i<j, S_C over all (i,j).
struct GramPair {
  Matrix sa;
  Matrix sc;
};

GramPair gram_pair(const AcmpSet& set);

/// A^T A' + (C^T C')^T. The transpose on the hole term carries the index
/// exchange of <psi| a_j c+_i |psi'>.
Matrix pair_product(const Acmp& d, const Acmp& dp);

struct AcmpResiduals {
  Matrix identity;  // pair_product(D, D) - tau I
  double trace = 0.0;  // Tr(A^T A) - tau N
};

AcmpResiduals acmp_residuals(const Acmp& d);

struct ResidualNorms {
  double d0_identity = 0.0;
  double d0_trace = 0.0;
  double child_identity = 0.0;
  double child_trace = 0.0;

  double max() const;
};

struct SetResiduals {
  Matrix d0_identity;
  double d0_trace = 0.0;
  /// (D^i^T D^i')_{jj'} - Gamma_{ii'} delta_{jj'} stored at (i, i', j, j').
  Tensor4 child_identity;
  /// Tr(A^i^T A^i') - (N-1) Gamma_{ii'}.
  Matrix child_trace;

  ResidualNorms norms() const;
};

SetResiduals set_residuals(const AcmpSet& set);

Rdm1 rdm1_from(const AcmpSet& set);
Rdm2 rdm2_from(const AcmpSet& set);

/// sum h1 Gamma1 + sum h2 Gamma2 evaluated from column overlaps.
double energy_of(const AcmpSet& set, const Hamiltonian& ham);

/// Same Gram matrices, at most min(n, rows) rows per side.
Acmp compact(const Acmp& d, const Tolerances& tol = default_tolerances);

/// Refactors every block of the set into the requested row budget.
/// Throws RepresentabilityError when a block needs more rows than allowed.
AcmpSet compact(const AcmpSet& set, const SetShape& shape, const Tolerances& tol = default_tolerances);
AcmpSet compact(const AcmpSet& set, const Tolerances& tol = default_tolerances);

struct ColemanReport {
  Vector occupations;        // squared singular values of A, descending
  Vector hole_occupations;   // natural-orbital diagonal of C^T C, aligned with occupations
  Vector electron_diagonal;  // diag(A^T A)
  Vector hole_diagonal;      // diag(C^T C)
  double occupation_sum = 0.0;
  bool pass = false;
};

/// Checks 0 <= n_i <= 1, sum n_i = N and hole occupations 1 - n_i.
ColemanReport coleman_check(const Acmp& d, const Tolerances& tol = default_tolerances);

/// Mixed-state set whose Gram matrices are the weighted averages of the
/// inputs. Weights must be positive and sum to one.
AcmpSet convex_mix(const std::vector<std::pair<AcmpSet, double>>& parts,
                   const Tolerances& tol = default_tolerances);

}  // namespace acmp
