#include "acmp/factorization.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace acmp {
namespace {

struct Pivoted {
  Matrix lower;  // m x rank, in pivot order
  std::vector<int> perm;
  int rank = 0;
  bool clean = true;  // remaining Schur complement is negligible
};

Pivoted pivoted_cholesky(const Matrix& gram, const Tolerances& tol) {
  const auto m = static_cast<int>(gram.rows());
  Matrix w = 0.5 * (gram + gram.transpose());
  const double scale = std::max(1.0, w.diagonal().cwiseAbs().maxCoeff());
  const double stop = tol.cholesky_pivot * scale;

  Pivoted out;
  out.perm.resize(static_cast<std::size_t>(m));
  std::iota(out.perm.begin(), out.perm.end(), 0);
  Matrix lower = Matrix::Zero(m, m);

  int k = 0;
  for (; k < m; ++k) {
    int p = k;
    for (int q = k + 1; q < m; ++q)
      if (w(q, q) > w(p, p)) p = q;
    if (w(p, p) <= stop) break;
    if (p != k) {
      w.row(k).swap(w.row(p));
      w.col(k).swap(w.col(p));
      lower.row(k).head(k).swap(lower.row(p).head(k));
      std::swap(out.perm[static_cast<std::size_t>(k)], out.perm[static_cast<std::size_t>(p)]);
    }
    const double d = std::sqrt(w(k, k));
    lower(k, k) = d;
    const int rest = m - k - 1;
    if (rest > 0) {
      lower.col(k).tail(rest) = w.col(k).tail(rest) / d;
      w.bottomRightCorner(rest, rest).noalias() -=
          lower.col(k).tail(rest) * lower.col(k).tail(rest).transpose();
    }
  }
  out.rank = k;
  out.lower = lower.leftCols(k);
  if (k < m) {
    const auto rem = w.bottomRightCorner(m - k, m - k);
    const double worst_neg = rem.diagonal().minCoeff();
    const double worst = rem.cwiseAbs().maxCoeff();
    out.clean = worst_neg >= -tol.gram_negative * scale && worst <= 10.0 * stop;
  }
  return out;
}

Matrix eigen_sqrt(const Matrix& gram, int& rank, const Tolerances& tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (gram + gram.transpose()));
  const Vector& w = es.eigenvalues();
  const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
  if (w.size() > 0 && w(0) < -tol.gram_negative * scale)
    throw RepresentabilityError("Gram matrix is indefinite (eigenvalue " + std::to_string(w(0)) + ")");
  const auto m = static_cast<int>(w.size());
  rank = 0;
  for (int k = 0; k < m; ++k)
    if (w(k) > tol.cholesky_pivot * scale) ++rank;
  Matrix r(rank, m);
  for (int k = 0; k < rank; ++k) {
    const int src = m - 1 - k;
    r.row(k) = std::sqrt(w(src)) * es.eigenvectors().col(src).transpose();
  }
  return r;
}

}  // namespace

int psd_rank(const Matrix& gram, const Tolerances& tol) {
  const Pivoted p = pivoted_cholesky(gram, tol);
  if (p.clean) return p.rank;
  int rank = 0;
  eigen_sqrt(gram, rank, tol);
  return rank;
}

Matrix psd_factor(const Matrix& gram, int rows, const Tolerances& tol) {
  if (gram.rows() != gram.cols()) throw DimensionError("psd_factor needs a square matrix");
  const auto m = static_cast<int>(gram.rows());

  Matrix core;
  int rank = 0;
  const Pivoted p = pivoted_cholesky(gram, tol);
  if (p.clean) {
    rank = p.rank;
    core = Matrix::Zero(rank, m);
    for (int a = 0; a < m; ++a) core.col(p.perm[static_cast<std::size_t>(a)]) = p.lower.row(a).transpose();
  } else {
    core = eigen_sqrt(gram, rank, tol);
  }

  const int out_rows = rows < 0 ? std::max(rank, 1) : rows;
  if (rank > out_rows)
    throw RepresentabilityError("Gram matrix of rank " + std::to_string(rank) + " does not fit in " +
                                std::to_string(out_rows) + " rows");
  Matrix r = Matrix::Zero(out_rows, m);
  r.topRows(rank) = core;
  return r;
}

}  // namespace acmp
