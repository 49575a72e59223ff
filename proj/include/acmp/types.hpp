#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace acmp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes or orbital counts that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed Hamiltonian text files or binary containers.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Gram matrices that are too indefinite to factor.
class RepresentabilityError : public Error {
 public:
  using Error::Error;
};

/// Numerical thresholds shared by the residual, factorization and
/// representability checks.
struct Tolerances {
  double representability = 1e-8;
  double identity = 1e-10;
  double cholesky_pivot = 1e-10;
  double gram_negative = 1e-8;
};

inline constexpr Tolerances default_tolerances{};

/// Binomial coefficient; zero when k is outside [0, n].
constexpr std::size_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

/// Dense rank-4 tensor T(i, i', j, j') over n orbitals, row-major with the
/// last index fastest. Used for two-body integrals H^{ii'}_{jj'}, the
/// 2-RDM and the two-body multipliers with the same index placement.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  int n() const { return n_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int i, int ip, int j, int jp) { return data_[offset(i, ip, j, jp)]; }
  double operator()(int i, int ip, int j, int jp) const { return data_[offset(i, ip, j, jp)]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double max_abs() const;
  Tensor4& operator*=(double s);
  Tensor4& operator+=(const Tensor4& o);
  friend Tensor4 operator-(const Tensor4& a, const Tensor4& b);

  /// Pair-matrix view M[(i*n+j), (i'*n+j')] = T(i, i', j, j').
  Matrix as_pair_matrix() const;
  static Tensor4 from_pair_matrix(const Matrix& m);

  bool operator==(const Tensor4&) const = default;

 private:
  std::size_t offset(int i, int ip, int j, int jp) const {
    const auto n = static_cast<std::size_t>(n_);
    return ((static_cast<std::size_t>(i) * n + ip) * n + j) * n + jp;
  }

  int n_ = 0;
  std::vector<double> data_;
};

inline double Tensor4::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

inline Tensor4& Tensor4::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

inline Tensor4& Tensor4::operator+=(const Tensor4& o) {
  if (o.n_ != n_) throw DimensionError("Tensor4 size mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}

inline Tensor4 operator-(const Tensor4& a, const Tensor4& b) {
  if (a.n_ != b.n_) throw DimensionError("Tensor4 size mismatch");
  Tensor4 r(a.n_);
  for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] - b.data_[k];
  return r;
}

inline Matrix Tensor4::as_pair_matrix() const {
  const int n = n_;
  Matrix m(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j)
        for (int jp = 0; jp < n; ++jp) m(i * n + j, ip * n + jp) = (*this)(i, ip, j, jp);
  return m;
}

inline Tensor4 Tensor4::from_pair_matrix(const Matrix& m) {
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m.rows()))));
  if (n * n != m.rows() || m.rows() != m.cols()) throw DimensionError("pair matrix must be n^2 x n^2");
  Tensor4 t(n);
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j)
        for (int jp = 0; jp < n; ++jp) t(i, ip, j, jp) = m(i * n + j, ip * n + jp);
  return t;
}

/// One-body reduced density matrix Gamma_{ii'} = <c+_i a_i'>.
using Rdm1 = Matrix;
/// Two-body reduced density matrix Gamma^{ii'}_{jj'} = <c+_i c+_j a_j' a_i'>.
using Rdm2 = Tensor4;

}  // namespace acmp
