#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "acmp/acmp.hpp"
#include "acmp/hamiltonian.hpp"
#include "acmp/types.hpp"

namespace acmp {

enum class Objective { plain, symmetrized };

/// Lagrange multipliers. lambda and mu are symmetric, Lambda satisfies
/// Lambda(i,i',j,j') = Lambda(i',i,j',j).
struct Multipliers {
  Matrix lambda;
  Tensor4 Lambda;
  double mu0 = 0.0;
  Matrix mu;

  static Multipliers zero(int n);
};

struct SolveState {
  AcmpSet set;
  Multipliers mult;
};

/// Flat unknown vector. Blocks in order, matrices column-major:
///   A0 (rows x n), C0 (rows x n), child A (rows x C(n,2)), child C (rows x n^2),
///   lambda over i <= i', Lambda over canonical tuples, mu0, mu over i <= i'.
/// A Lambda tuple (i,i',j,j') is canonical when it is lexicographically not
/// greater than its partner (i',i,j',j); tuples are listed lexicographically.
class Layout {
 public:
  Layout(int n, int N);
  Layout(int n, int N, const SetShape& shape);

  int n() const { return n_; }
  int particles() const { return N_; }
  const SetShape& shape() const { return shape_; }

  Eigen::Index a0_offset() const { return 0; }
  Eigen::Index c0_offset() const { return c0_; }
  Eigen::Index child_a_offset() const { return ca_; }
  Eigen::Index child_c_offset() const { return cc_; }
  Eigen::Index primal_size() const { return lam_; }
  Eigen::Index lambda_offset() const { return lam_; }
  Eigen::Index Lambda_offset() const { return big_lam_; }
  Eigen::Index mu0_offset() const { return mu0_; }
  Eigen::Index mu_offset() const { return mu_; }
  Eigen::Index multiplier_size() const { return size_ - lam_; }
  Eigen::Index size() const { return size_; }

  const std::vector<std::pair<int, int>>& pair_entries() const { return pairs_; }
  const std::vector<std::array<int, 4>>& Lambda_entries() const { return tuples_; }
  /// Canonical position of any (i,i',j,j') within the Lambda block.
  int Lambda_index(int i, int ip, int j, int jp) const;

  Vector flatten(const SolveState& s) const;
  SolveState unflatten(const Vector& x) const;
  Vector flatten_multipliers(const Multipliers& m) const;
  Multipliers unflatten_multipliers(const Eigen::Ref<const Vector>& m) const;
  Vector flatten_set(const AcmpSet& set) const;
  AcmpSet unflatten_set(const Eigen::Ref<const Vector>& primal) const;

 private:
  int n_;
  int N_;
  SetShape shape_;
  Eigen::Index c0_ = 0, ca_ = 0, cc_ = 0, lam_ = 0, big_lam_ = 0, mu0_ = 0, mu_ = 0, size_ = 0;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<std::array<int, 4>> tuples_;
  std::vector<int> tuple_index_;
};

/// Overlap matrices of the primal unknowns: g = A0^T A0, k = C0^T C0,
/// s = A^T A over all n^2 child columns (signs expanded), t = C^T C of the child C block.
struct Grams {
  Matrix g;
  Matrix k;
  Matrix s;
  Matrix t;
};

/// The plain or symmetrized Lagrangian as a function of the flat vector.
///
/// Both are written as E(x) - sum_k m_k c_k(x), where c_k are the canonical
/// constraint residuals (off-diagonal orbit members summed), so the
/// multiplier block of the gradient is -c.
class Lagrangian {
 public:
  Lagrangian(Hamiltonian ham, int N, Objective objective = Objective::plain);
  Lagrangian(Hamiltonian ham, int N, Objective objective, const SetShape& shape);

  const Layout& layout() const { return layout_; }
  const Hamiltonian& hamiltonian() const { return ham_; }
  Objective objective() const { return objective_; }

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;

  Grams grams(const Eigen::Ref<const Vector>& primal) const;
  /// Canonical residuals c(x), laid out like the multiplier block.
  Vector residuals(const Grams& g) const;
  /// Energy part of the objective (equal to the physical energy on feasible points).
  double objective_energy(const Grams& g) const;
  /// sum h1 Gamma1 + sum h2 Gamma2 of the current columns.
  double physical_energy(const Grams& g) const;
  /// Gradient with respect to the primal block at the given multiplier block.
  /// `with_energy = false` drops the Hamiltonian terms, which makes the
  /// result linear in the multipliers.
  Vector primal_gradient(const Eigen::Ref<const Vector>& primal, const Eigen::Ref<const Vector>& mult,
                         bool with_energy = true) const;

 private:
  struct Weights {
    Matrix a0, c0, a, c;
  };
  Weights weights(const Eigen::Ref<const Vector>& mult, bool with_energy) const;

  Hamiltonian ham_;
  int N_;
  Objective objective_;
  Layout layout_;
  Matrix h_eff_;    // one-body weight of the energy term
  Matrix h2_pair_;  // two-body weight in pair-matrix form
  double energy_const_ = 0.0;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  Eigen::Index worst_index = -1;
  int samples = 0;
};

/// Compares central differences with the analytic gradient on `count`
/// coordinates drawn with the given seed. The error of a coordinate is
/// |fd - analytic| / max(1, |analytic|).
GradCheckReport grad_check(const Lagrangian& lag, const Vector& x, double step, int count, std::uint64_t seed);

/// Random flat vector, entries uniform in [-scale, scale].
Vector random_point(const Layout& layout, std::uint64_t seed, double scale = 1.0);

}  // namespace acmp
