#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "acmp/acmp.hpp"
#include "acmp/hamiltonian.hpp"
#include "acmp/types.hpp"

namespace acmp {

/// Occupation set over n orbitals, bit k set when orbital k (0-based) is
/// occupied. The ket |i1 < ... < iN> stands for c+_iN ... c+_i1 |0>.
struct Determinant {
  std::uint64_t occ = 0;
  int n = 0;

  int particles() const;
  bool occupied(int i) const { return ((occ >> i) & 1U) != 0; }
  bool operator==(const Determinant&) const = default;
};

struct SignedDeterminant {
  Determinant det;
  int phase = 1;
};

/// a_i |d>; empty when i is unoccupied. The phase is (-1)^(occupied orbitals above i).
std::optional<SignedDeterminant> apply_annihilation(int i, const Determinant& d);
/// c+_i |d>; empty when i is occupied. Same phase convention.
std::optional<SignedDeterminant> apply_creation(int i, const Determinant& d);

/// All C(n, N) determinants of a sector in ascending bitmask order.
class DeterminantBasis {
 public:
  DeterminantBasis(int n, int N);

  int orbitals() const { return n_; }
  int particles() const { return N_; }
  int size() const { return static_cast<int>(masks_.size()); }
  Determinant operator[](int k) const { return {masks_[static_cast<std::size_t>(k)], n_}; }

  /// Position of a determinant, -1 when it is not in this sector.
  int index(const Determinant& d) const;

 private:
  int n_;
  int N_;
  std::vector<std::uint64_t> masks_;
};

struct Wavefunction {
  std::shared_ptr<const DeterminantBasis> basis;
  Vector coeffs;

  Wavefunction(std::shared_ptr<const DeterminantBasis> b, Vector c);
  int orbitals() const { return basis->orbitals(); }
  int particles() const { return basis->particles(); }
};

Wavefunction make_wavefunction(int n, int N, Vector coeffs);

/// a_i |psi> expanded in the N-1 sector (zero vector when N = 0 is reached from an empty psi).
Wavefunction annihilate(int i, const Wavefunction& psi);
/// c+_i |psi> expanded in the N+1 sector.
Wavefunction create(int i, const Wavefunction& psi);

/// Dense <K| h1 + h2 |K'> over a sector.
Matrix build_hamiltonian_matrix(const Hamiltonian& ham, const DeterminantBasis& basis);

/// Largest sector handled by the dense eigensolver.
inline constexpr int max_dense_dimension = 20000;

struct GroundState {
  double energy = 0.0;
  Wavefunction psi;
};

/// Lowest eigenpair. The eigenvector is normalized and its largest
/// coefficient made positive.
GroundState ground_state(const Hamiltonian& ham, int N);

/// Normalized Gaussian random state, deterministic in the seed.
Wavefunction random_wavefunction(int n, int N, std::uint64_t seed);

/// Determinant built from the given orbitals (n x N, orthonormal columns):
/// coefficient of |K> is det(orbitals[K, :]).
Wavefunction slater_determinant(const Matrix& orbitals);

/// Gamma_{ii'} = <psi| c+_i a_i' |psi>.
Rdm1 rdm1_of(const Wavefunction& psi);
/// Gamma^{ii'}_{jj'} = <psi| c+_i c+_j a_j' a_i' |psi>.
Rdm2 rdm2_of(const Wavefunction& psi);

/// Exact pair (A, C) with tau = <psi|psi>; requires 0 < N < n.
Acmp acmp_from_wavefunction(const Wavefunction& psi);
/// D0 plus the child columns a_j a_i |psi> and c+_j a_i |psi>; requires N >= 2.
/// Row counts are the full sector sizes; call compact() to shrink them.
AcmpSet acmp_set_from_wavefunction(const Wavefunction& psi);

}  // namespace acmp
