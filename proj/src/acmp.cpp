#include "acmp/acmp.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "acmp/factorization.hpp"

namespace acmp {

SetShape SetShape::minimal(int n, int N) {
  auto cap = [](std::size_t a, std::size_t b) { return static_cast<int>(std::min(a, b)); };
  const auto nn = static_cast<std::size_t>(n);
  return SetShape{cap(nn, binomial(n, N - 1)), cap(nn, binomial(n, N + 1)), cap(binomial(n, 2), binomial(n, N - 2)),
                  cap(nn * nn, binomial(n, N))};
}

AcmpSet::AcmpSet(Acmp d0, Matrix child_a, Matrix child_c)
    : d0_(std::move(d0)), child_a_(std::move(child_a)), child_c_(std::move(child_c)) {
  const int n = d0_.n();
  if (d0_.C.cols() != n) throw DimensionError("D0 matrices must have the same column count");
  if (child_a_.cols() != static_cast<Eigen::Index>(binomial(n, 2)))
    throw DimensionError("child A needs C(n,2) pair columns");
  if (child_c_.cols() != static_cast<Eigen::Index>(n) * n) throw DimensionError("child C needs n^2 columns");
}

SetShape AcmpSet::shape() const {
  return SetShape{static_cast<int>(d0_.A.rows()), static_cast<int>(d0_.C.rows()), static_cast<int>(child_a_.rows()),
                  static_cast<int>(child_c_.rows())};
}

Vector AcmpSet::a(int i, int j) const {
  if (i == j) return Vector::Zero(child_a_.rows());
  if (i < j) return child_a_.col(pair_index(i, j, n()));
  return -child_a_.col(pair_index(j, i, n()));
}

Matrix AcmpSet::a_full() const {
  const int n = this->n();
  Matrix out = Matrix::Zero(child_a_.rows(), n * n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const auto col = child_a_.col(pair_index(i, j, n));
      out.col(i * n + j) = col;
      out.col(j * n + i) = -col;
    }
  return out;
}

Acmp AcmpSet::child(int i) const {
  const int n = this->n();
  Acmp d;
  d.A.resize(child_a_.rows(), n);
  d.C.resize(child_c_.rows(), n);
  for (int j = 0; j < n; ++j) {
    d.A.col(j) = a(i, j);
    d.C.col(j) = c(i, j);
  }
  d.N = particles() - 1;
  d.tau = d0_.A.col(i).squaredNorm();
  return d;
}

GramPair gram_pair(const AcmpSet& set) {
  GramPair g;
  g.sa = set.child_a().transpose() * set.child_a();
  g.sc = set.child_c().transpose() * set.child_c();
  return g;
}

Matrix pair_product(const Acmp& d, const Acmp& dp) {
  if (d.n() != dp.n() || d.C.cols() != dp.C.cols()) throw DimensionError("pair_product: column counts differ");
  if (d.A.rows() != dp.A.rows() || d.C.rows() != dp.C.rows())
    throw DimensionError("pair_product: row counts differ");
  return d.A.transpose() * dp.A + (d.C.transpose() * dp.C).transpose();
}

AcmpResiduals acmp_residuals(const Acmp& d) {
  AcmpResiduals r;
  r.identity = pair_product(d, d) - d.tau * Matrix::Identity(d.n(), d.n());
  r.trace = d.A.squaredNorm() - d.tau * d.N;
  return r;
}

double ResidualNorms::max() const { return std::max({d0_identity, d0_trace, child_identity, child_trace}); }

ResidualNorms SetResiduals::norms() const {
  ResidualNorms r;
  r.d0_identity = d0_identity.size() ? d0_identity.cwiseAbs().maxCoeff() : 0.0;
  r.d0_trace = std::abs(d0_trace);
  r.child_identity = child_identity.max_abs();
  r.child_trace = child_trace.size() ? child_trace.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

SetResiduals set_residuals(const AcmpSet& set) {
  const int n = set.n();
  const int N = set.particles();
  SetResiduals r;
  const AcmpResiduals d0 = acmp_residuals(set.d0());
  r.d0_identity = d0.identity;
  r.d0_trace = d0.trace;

  const Matrix gamma = rdm1_from(set);
  const Matrix af = set.a_full();
  const Matrix s = af.transpose() * af;
  const Matrix t = set.child_c().transpose() * set.child_c();
  r.child_identity = Tensor4(n);
  r.child_trace = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip) {
      double tr = 0.0;
      for (int j = 0; j < n; ++j) {
        for (int jp = 0; jp < n; ++jp) {
          double v = s(i * n + j, ip * n + jp) + t(i * n + jp, ip * n + j);
          if (j == jp) v -= gamma(i, ip);
          r.child_identity(i, ip, j, jp) = v;
        }
        tr += s(i * n + j, ip * n + j);
      }
      r.child_trace(i, ip) = tr - (N - 1) * gamma(i, ip);
    }
  return r;
}

Rdm1 rdm1_from(const AcmpSet& set) { return set.d0().A.transpose() * set.d0().A; }

Rdm2 rdm2_from(const AcmpSet& set) {
  const Matrix af = set.a_full();
  return Tensor4::from_pair_matrix(af.transpose() * af);
}

double energy_of(const AcmpSet& set, const Hamiltonian& ham) {
  if (ham.n != set.n()) throw DimensionError("energy_of: Hamiltonian and set have different n");
  const Matrix af = set.a_full();
  const Matrix s = af.transpose() * af;
  return (ham.h1.array() * rdm1_from(set).array()).sum() + (ham.h2.as_pair_matrix().array() * s.array()).sum();
}

Acmp compact(const Acmp& d, const Tolerances& tol) {
  const int n = d.n();
  Acmp out;
  out.N = d.N;
  out.tau = d.tau;
  out.A = psd_factor(d.A.transpose() * d.A, static_cast<int>(std::min<Eigen::Index>(n, d.A.rows())), tol);
  out.C = psd_factor(d.C.transpose() * d.C, static_cast<int>(std::min<Eigen::Index>(n, d.C.rows())), tol);
  return out;
}

AcmpSet compact(const AcmpSet& set, const SetShape& shape, const Tolerances& tol) {
  Acmp d0;
  d0.N = set.d0().N;
  d0.tau = set.d0().tau;
  d0.A = psd_factor(set.d0().A.transpose() * set.d0().A, shape.d0_a, tol);
  d0.C = psd_factor(set.d0().C.transpose() * set.d0().C, shape.d0_c, tol);
  const GramPair g = gram_pair(set);
  return AcmpSet(std::move(d0), psd_factor(g.sa, shape.child_a, tol), psd_factor(g.sc, shape.child_c, tol));
}

AcmpSet compact(const AcmpSet& set, const Tolerances& tol) {
  return compact(set, SetShape::minimal(set.n(), set.particles()), tol);
}

ColemanReport coleman_check(const Acmp& d, const Tolerances& tol) {
  if (std::abs(d.tau - 1.0) > 1e-12) throw Error("coleman_check requires tau = 1");
  const int n = d.n();
  const Matrix ge = d.A.transpose() * d.A;
  const Matrix gh = d.C.transpose() * d.C;
  Eigen::SelfAdjointEigenSolver<Matrix> es(ge);

  ColemanReport r;
  r.occupations.resize(n);
  r.hole_occupations.resize(n);
  for (int k = 0; k < n; ++k) {
    const int src = n - 1 - k;
    const auto u = es.eigenvectors().col(src);
    r.occupations(k) = es.eigenvalues()(src);
    r.hole_occupations(k) = u.dot(gh * u);
  }
  r.electron_diagonal = ge.diagonal();
  r.hole_diagonal = gh.diagonal();
  r.occupation_sum = r.occupations.sum();

  const double eps = tol.representability;
  bool ok = std::abs(r.occupation_sum - d.N) <= eps;
  for (int k = 0; k < n; ++k) {
    ok = ok && r.occupations(k) >= -eps && r.occupations(k) <= 1.0 + eps;
    ok = ok && std::abs(r.hole_occupations(k) - (1.0 - r.occupations(k))) <= eps;
  }
  r.pass = ok;
  return r;
}

AcmpSet convex_mix(const std::vector<std::pair<AcmpSet, double>>& parts, const Tolerances& tol) {
  if (parts.empty()) throw Error("convex_mix needs at least one set");
  const int n = parts.front().first.n();
  const int N = parts.front().first.particles();
  double total = 0.0;
  for (const auto& [set, w] : parts) {
    if (!(w > 0.0)) throw Error("convex_mix weights must be positive");
    if (set.n() != n || set.particles() != N) throw DimensionError("convex_mix needs identical (n, N)");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw Error("convex_mix weights must sum to 1");

  Matrix ge = Matrix::Zero(n, n), gh = Matrix::Zero(n, n);
  const auto pairs = static_cast<Eigen::Index>(binomial(n, 2));
  Matrix sa = Matrix::Zero(pairs, pairs), sc = Matrix::Zero(n * n, n * n);
  double tau = 0.0;
  for (const auto& [set, w] : parts) {
    ge += w * set.d0().A.transpose() * set.d0().A;
    gh += w * set.d0().C.transpose() * set.d0().C;
    const GramPair g = gram_pair(set);
    sa += w * g.sa;
    sc += w * g.sc;
    tau += w * set.d0().tau;
  }
  Acmp d0;
  d0.N = N;
  d0.tau = tau;
  d0.A = psd_factor(ge, -1, tol);
  d0.C = psd_factor(gh, -1, tol);
  return AcmpSet(std::move(d0), psd_factor(sa, -1, tol), psd_factor(sc, -1, tol));
}

}  // namespace acmp
