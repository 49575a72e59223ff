#pragma once

// Reference implementations used only by the tests. They work in the full
// 2^n Fock space with Jordan-Wigner operator matrices and a cyclic Jacobi
// eigensolver, so they share no code with the library.

#include <acmp/fock.hpp>
#include <acmp/hamiltonian.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using acmp::Matrix;
using acmp::Vector;

// a_i on the full Fock space, basis index = occupation bitmask.
// The string runs over the orbitals above i, matching the library kets.
inline Matrix annihilator(int n, int i) {
  const int dim = 1 << n;
  Matrix a = Matrix::Zero(dim, dim);
  for (int s = 0; s < dim; ++s) {
    if (((s >> i) & 1) == 0) continue;
    const int above = std::popcount(static_cast<unsigned>(s) >> (i + 1));
    a(s & ~(1 << i), s) = (above % 2 == 0) ? 1.0 : -1.0;
  }
  return a;
}

struct FockOps {
  int n;
  std::vector<Matrix> a;   // a_i
  std::vector<Matrix> cd;  // c+_i

  explicit FockOps(int orbitals) : n(orbitals) {
    for (int i = 0; i < n; ++i) {
      a.push_back(annihilator(n, i));
      cd.push_back(a.back().transpose());
    }
  }
};

inline Matrix full_hamiltonian(const acmp::Hamiltonian& ham, const FockOps& ops) {
  const int n = ham.n;
  const int dim = 1 << n;
  Matrix h = Matrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      if (ham.h1(i, ip) != 0.0) h += ham.h1(i, ip) * ops.cd[i] * ops.a[ip];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const Matrix cc = ops.cd[i] * ops.cd[j];
      for (int ip = 0; ip < n; ++ip)
        for (int jp = 0; jp < n; ++jp) {
          const double v = ham.h2(i, ip, j, jp);
          if (v != 0.0 && ip != jp) h += v * cc * (ops.a[jp] * ops.a[ip]);
        }
    }
  return h;
}

// Bitmasks with N set bits, ascending.
inline std::vector<int> sector(int n, int N) {
  std::vector<int> out;
  for (int s = 0; s < (1 << n); ++s)
    if (std::popcount(static_cast<unsigned>(s)) == N) out.push_back(s);
  return out;
}

inline Matrix restrict(const Matrix& full, const std::vector<int>& idx) {
  Matrix m(idx.size(), idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t c = 0; c < idx.size(); ++c) m(r, c) = full(idx[r], idx[c]);
  return m;
}

struct Spectrum {
  Vector values;   // ascending
  Matrix vectors;  // columns
};

// Cyclic Jacobi rotations until the off-diagonal mass is negligible.
inline Spectrum jacobi(Matrix a) {
  const auto m = a.rows();
  Matrix v = Matrix::Identity(m, m);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < m; ++p)
      for (Eigen::Index q = p + 1; q < m; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < m; ++p)
      for (Eigen::Index q = p + 1; q < m; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < m; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < m; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k < m; ++k) order[static_cast<std::size_t>(k)] = k;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return a(x, x) < a(y, y); });
  Spectrum out{Vector(m), Matrix(m, m)};
  for (Eigen::Index k = 0; k < m; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

// Full-space vector of a library wavefunction.
inline Vector embed(const acmp::Wavefunction& psi) {
  Vector full = Vector::Zero(1 << psi.orbitals());
  for (int k = 0; k < psi.basis->size(); ++k) full(static_cast<Eigen::Index>((*psi.basis)[k].occ)) = psi.coeffs(k);
  return full;
}

inline Vector embed(const Vector& coeffs, const std::vector<int>& idx, int n) {
  Vector full = Vector::Zero(1 << n);
  for (std::size_t k = 0; k < idx.size(); ++k) full(idx[k]) = coeffs(static_cast<Eigen::Index>(k));
  return full;
}

struct Ground {
  double energy;
  Vector full;  // normalized, full Fock space
};

inline Ground ground(const acmp::Hamiltonian& ham, int N, const FockOps& ops) {
  const auto idx = sector(ham.n, N);
  const Spectrum e = jacobi(restrict(full_hamiltonian(ham, ops), idx));
  return {e.values(0), embed(Vector(e.vectors.col(0)), idx, ham.n)};
}

inline Matrix rdm1(const Vector& psi, const FockOps& ops) {
  Matrix g(ops.n, ops.n);
  for (int i = 0; i < ops.n; ++i)
    for (int ip = 0; ip < ops.n; ++ip) g(i, ip) = psi.dot(ops.cd[i] * (ops.a[ip] * psi));
  return g;
}

inline acmp::Tensor4 rdm2(const Vector& psi, const FockOps& ops) {
  const int n = ops.n;
  acmp::Tensor4 g(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Vector left = ops.a[j] * (ops.a[i] * psi);  // (c+_i c+_j)^T psi
      for (int ip = 0; ip < n; ++ip)
        for (int jp = 0; jp < n; ++jp) g(i, ip, j, jp) = left.dot(ops.a[jp] * (ops.a[ip] * psi));
    }
  return g;
}

// Tr(h1 G1) + sum h2 G2, contracted directly.
inline double contract(const acmp::Hamiltonian& ham, const Matrix& g1, const acmp::Tensor4& g2) {
  double e = (ham.h1.array() * g1.array()).sum();
  for (std::size_t k = 0; k < g2.size(); ++k) e += ham.h2.data()[k] * g2.data()[k];
  return e;
}

inline Matrix random_orthogonal(Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Matrix g(m, m);
  for (Eigen::Index k = 0; k < g.size(); ++k) g.data()[k] = nd(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ();
}

}  // namespace oracle
