#include "acmp/fock.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <string>

namespace acmp {
namespace {

void check_orbital(int i, int n) {
  if (i < 0 || i >= n)
    throw DimensionError("orbital index " + std::to_string(i) + " outside 0.." + std::to_string(n - 1));
}

int count_above(std::uint64_t occ, int i) { return std::popcount(occ >> (i + 1)); }

std::shared_ptr<const DeterminantBasis> shared_basis(int n, int N) {
  return std::make_shared<const DeterminantBasis>(n, N);
}

}  // namespace

int Determinant::particles() const { return std::popcount(occ); }

std::optional<SignedDeterminant> apply_annihilation(int i, const Determinant& d) {
  check_orbital(i, d.n);
  if (!d.occupied(i)) return std::nullopt;
  const int phase = count_above(d.occ, i) % 2 ? -1 : 1;
  return SignedDeterminant{{d.occ & ~(std::uint64_t{1} << i), d.n}, phase};
}

std::optional<SignedDeterminant> apply_creation(int i, const Determinant& d) {
  check_orbital(i, d.n);
  if (d.occupied(i)) return std::nullopt;
  const int phase = count_above(d.occ, i) % 2 ? -1 : 1;
  return SignedDeterminant{{d.occ | (std::uint64_t{1} << i), d.n}, phase};
}

DeterminantBasis::DeterminantBasis(int n, int N) : n_(n), N_(N) {
  if (n < 1 || n > 63) throw DimensionError("orbital count must be in 1..63");
  if (N < 0 || N > n) throw DimensionError("particle count outside 0..n");
  masks_.reserve(binomial(n, N));
  if (N == 0) {
    masks_.push_back(0);
    return;
  }
  // Gosper's hack enumerates N-bit masks in increasing order.
  std::uint64_t m = (std::uint64_t{1} << N) - 1;
  const std::uint64_t limit = std::uint64_t{1} << n;
  while (m < limit) {
    masks_.push_back(m);
    const std::uint64_t c = m & (~m + 1);
    const std::uint64_t r = m + c;
    m = (((r ^ m) >> 2) / c) | r;
  }
}

int DeterminantBasis::index(const Determinant& d) const {
  const auto it = std::lower_bound(masks_.begin(), masks_.end(), d.occ);
  if (it == masks_.end() || *it != d.occ) return -1;
  return static_cast<int>(it - masks_.begin());
}

Wavefunction::Wavefunction(std::shared_ptr<const DeterminantBasis> b, Vector c)
    : basis(std::move(b)), coeffs(std::move(c)) {
  if (coeffs.size() != basis->size()) throw DimensionError("coefficient count does not match the basis size");
}

Wavefunction make_wavefunction(int n, int N, Vector coeffs) { return {shared_basis(n, N), std::move(coeffs)}; }

Wavefunction annihilate(int i, const Wavefunction& psi) {
  const int n = psi.orbitals();
  const int N = psi.particles();
  check_orbital(i, n);
  if (N == 0) throw DimensionError("cannot annihilate in the vacuum sector");
  auto target = shared_basis(n, N - 1);
  Vector out = Vector::Zero(target->size());
  const DeterminantBasis& b = *psi.basis;
  for (int k = 0; k < b.size(); ++k)
    if (const auto r = apply_annihilation(i, b[k])) out(target->index(r->det)) += r->phase * psi.coeffs(k);
  return {std::move(target), std::move(out)};
}

Wavefunction create(int i, const Wavefunction& psi) {
  const int n = psi.orbitals();
  const int N = psi.particles();
  check_orbital(i, n);
  if (N == n) throw DimensionError("cannot create in a filled sector");
  auto target = shared_basis(n, N + 1);
  Vector out = Vector::Zero(target->size());
  const DeterminantBasis& b = *psi.basis;
  for (int k = 0; k < b.size(); ++k)
    if (const auto r = apply_creation(i, b[k])) out(target->index(r->det)) += r->phase * psi.coeffs(k);
  return {std::move(target), std::move(out)};
}

Matrix build_hamiltonian_matrix(const Hamiltonian& ham, const DeterminantBasis& basis) {
  const int n = basis.orbitals();
  if (ham.n != n) throw DimensionError("Hamiltonian and basis have different orbital counts");
  const int dim = basis.size();
  Matrix m = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    const Determinant d = basis[k];
    for (int ip = 0; ip < n; ++ip) {
      const auto r1 = apply_annihilation(ip, d);
      if (!r1) continue;
      for (int i = 0; i < n; ++i)
        if (const auto r2 = apply_creation(i, r1->det))
          m(basis.index(r2->det), k) += ham.h1(i, ip) * r1->phase * r2->phase;
      // c+_i c+_j a_j' a_i'
      for (int jp = 0; jp < n; ++jp) {
        const auto r3 = apply_annihilation(jp, r1->det);
        if (!r3) continue;
        for (int j = 0; j < n; ++j) {
          const auto r4 = apply_creation(j, r3->det);
          if (!r4) continue;
          for (int i = 0; i < n; ++i) {
            const auto r5 = apply_creation(i, r4->det);
            if (!r5) continue;
            const int phase = r1->phase * r3->phase * r4->phase * r5->phase;
            m(basis.index(r5->det), k) += ham.h2(i, ip, j, jp) * phase;
          }
        }
      }
    }
  }
  return m;
}

GroundState ground_state(const Hamiltonian& ham, int N) {
  const int n = ham.n;
  if (N < 0 || N > n) throw DimensionError("particle count outside 0..n");
  if (binomial(n, N) > static_cast<std::size_t>(max_dense_dimension))
    throw DimensionError("sector dimension C(" + std::to_string(n) + "," + std::to_string(N) + ") = " +
                         std::to_string(binomial(n, N)) + " exceeds the dense limit " +
                         std::to_string(max_dense_dimension));
  auto basis = shared_basis(n, N);
  const Matrix m = build_hamiltonian_matrix(ham, *basis);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw Error("eigensolver failed");
  Vector v = es.eigenvectors().col(0);
  Eigen::Index big = 0;
  v.cwiseAbs().maxCoeff(&big);
  if (v(big) < 0) v = -v;
  return {es.eigenvalues()(0), Wavefunction(std::move(basis), std::move(v))};
}

Wavefunction random_wavefunction(int n, int N, std::uint64_t seed) {
  auto basis = shared_basis(n, N);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector c(basis->size());
  for (auto& v : c) v = normal(rng);
  c.normalize();
  return {std::move(basis), std::move(c)};
}

Wavefunction slater_determinant(const Matrix& orbitals) {
  const int n = static_cast<int>(orbitals.rows());
  const int N = static_cast<int>(orbitals.cols());
  auto basis = shared_basis(n, N);
  Vector c(basis->size());
  Matrix sub(N, N);
  for (int k = 0; k < basis->size(); ++k) {
    const Determinant d = (*basis)[k];
    int r = 0;
    for (int i = 0; i < n; ++i)
      if (d.occupied(i)) sub.row(r++) = orbitals.row(i);
    c(k) = N == 0 ? 1.0 : sub.determinant();
  }
  return {std::move(basis), std::move(c)};
}

Rdm1 rdm1_of(const Wavefunction& psi) {
  const int n = psi.orbitals();
  const DeterminantBasis& b = *psi.basis;
  Matrix g = Matrix::Zero(n, n);
  for (int k = 0; k < b.size(); ++k) {
    if (psi.coeffs(k) == 0.0) continue;
    for (int ip = 0; ip < n; ++ip) {
      const auto r1 = apply_annihilation(ip, b[k]);
      if (!r1) continue;
      for (int i = 0; i < n; ++i)
        if (const auto r2 = apply_creation(i, r1->det))
          g(i, ip) += psi.coeffs(b.index(r2->det)) * r1->phase * r2->phase * psi.coeffs(k);
    }
  }
  return g;
}

Rdm2 rdm2_of(const Wavefunction& psi) {
  const int n = psi.orbitals();
  const DeterminantBasis& b = *psi.basis;
  Tensor4 g(n);
  for (int k = 0; k < b.size(); ++k) {
    if (psi.coeffs(k) == 0.0) continue;
    for (int ip = 0; ip < n; ++ip) {
      const auto r1 = apply_annihilation(ip, b[k]);
      if (!r1) continue;
      for (int jp = 0; jp < n; ++jp) {
        const auto r2 = apply_annihilation(jp, r1->det);
        if (!r2) continue;
        for (int j = 0; j < n; ++j) {
          const auto r3 = apply_creation(j, r2->det);
          if (!r3) continue;
          for (int i = 0; i < n; ++i) {
            const auto r4 = apply_creation(i, r3->det);
            if (!r4) continue;
            const int phase = r1->phase * r2->phase * r3->phase * r4->phase;
            g(i, ip, j, jp) += psi.coeffs(b.index(r4->det)) * phase * psi.coeffs(k);
          }
        }
      }
    }
  }
  return g;
}

Acmp acmp_from_wavefunction(const Wavefunction& psi) {
  const int n = psi.orbitals();
  const int N = psi.particles();
  if (N == 0) throw DimensionError("acmp_from_wavefunction: N = 0 has no annihilation side");
  if (N == n) throw DimensionError("acmp_from_wavefunction: N = n has no creation side");
  Acmp d;
  d.N = N;
  d.tau = psi.coeffs.squaredNorm();
  d.A.resize(static_cast<Eigen::Index>(binomial(n, N - 1)), n);
  d.C.resize(static_cast<Eigen::Index>(binomial(n, N + 1)), n);
  for (int j = 0; j < n; ++j) {
    d.A.col(j) = annihilate(j, psi).coeffs;
    d.C.col(j) = create(j, psi).coeffs;
  }
  return d;
}

AcmpSet acmp_set_from_wavefunction(const Wavefunction& psi) {
  const int n = psi.orbitals();
  const int N = psi.particles();
  if (N < 2) throw DimensionError("acmp_set_from_wavefunction needs N >= 2");
  Acmp d0 = acmp_from_wavefunction(psi);
  Matrix child_a(static_cast<Eigen::Index>(binomial(n, N - 2)), static_cast<Eigen::Index>(binomial(n, 2)));
  Matrix child_c(static_cast<Eigen::Index>(binomial(n, N)), n * n);
  for (int i = 0; i < n; ++i) {
    const Wavefunction ai = annihilate(i, psi);
    for (int j = 0; j < n; ++j) {
      if (j > i) child_a.col(AcmpSet::pair_index(i, j, n)) = annihilate(j, ai).coeffs;
      child_c.col(i * n + j) = create(j, ai).coeffs;
    }
  }
  return AcmpSet(std::move(d0), std::move(child_a), std::move(child_c));
}

}  // namespace acmp
