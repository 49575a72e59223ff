#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "acmp/types.hpp"

namespace acmp {

/// Real two-body fermionic Hamiltonian
///   H = sum_{ii'} h1(i,i') c+_i a_i' + sum_{ii'jj'} h2(i,i',j,j') c+_i c+_j a_j' a_i'
/// over n orbitals (0-based indices in memory, 1-based in files).
///
/// Required symmetries: h1 symmetric, h2(i,i',j,j') = h2(i',i,j',j)
/// (hermiticity) and h2(i,i',j,j') = h2(j,j',i,i') (pair swap).
struct Hamiltonian {
  int n = 0;
  Matrix h1;
  Tensor4 h2;

  Hamiltonian() = default;
  explicit Hamiltonian(int orbitals) : n(orbitals), h1(Matrix::Zero(orbitals, orbitals)), h2(orbitals) {}

  Hamiltonian scaled_two_body(double s) const;
  bool operator==(const Hamiltonian& o) const { return n == o.n && h1 == o.h1 && h2 == o.h2; }
};

struct Violation {
  std::string kind;  // "shape", "non-finite", "h1-symmetry", "hermiticity", "pair-swap"
  std::vector<int> indices;
  double deviation = 0.0;
  std::string message;
};

/// Uniform entries in [-scale, scale], then symmetrized so every invariant
/// holds exactly. Deterministic for a given seed.
Hamiltonian random_hamiltonian(int n, std::uint64_t seed, double one_body_scale = 1.0,
                               double two_body_scale = 1.0);

std::vector<Violation> validate_hamiltonian(const Hamiltonian& ham, double tol = 1e-12);

/// Folds the trace part of the two-body tensor into the one-body matrix:
///   g(i,i')   = (1/2n) sum_j h2(i,i',j,j)
///   h1'       = h1 + g
///   h2'       = h2 - (g(i,i') d(j,j') + g(j,j') d(i,i')) / (2 (N-1))
/// Every N-particle expectation value is unchanged.
Hamiltonian embed_one_body(const Hamiltonian& ham, int particles);

/// ACMPH v1 text format.
void write_hamiltonian(std::ostream& os, const Hamiltonian& ham);
Hamiltonian read_hamiltonian(std::istream& is);
void save_hamiltonian(const Hamiltonian& ham, const std::filesystem::path& path);
Hamiltonian load_hamiltonian(const std::filesystem::path& path);

}  // namespace acmp
