#include "acmp/newton_krylov.hpp"

#include <cmath>

namespace acmp {

Vector gmres(const std::function<Vector(const Vector&)>& apply, const Vector& b, const KrylovOptions& opts) {
  const Eigen::Index dim = b.size();
  const int m = std::max(1, opts.subspace);
  const double bnorm = b.norm();
  Vector x = Vector::Zero(dim);
  if (bnorm == 0.0) return x;
  const double target = opts.relative_tolerance * bnorm;

  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    const Vector r = restart == 0 ? b : Vector(b - apply(x));
    const double beta = r.norm();
    if (beta <= target) break;

    Matrix v(dim, m + 1);
    Matrix h = Matrix::Zero(m + 1, m);
    Vector cs = Vector::Zero(m), sn = Vector::Zero(m);
    Vector g = Vector::Zero(m + 1);
    g(0) = beta;
    v.col(0) = r / beta;
    int used = 0;
    for (int k = 0; k < m; ++k) {
      Vector w = apply(v.col(k));
      for (int j = 0; j <= k; ++j) {
        h(j, k) = w.dot(v.col(j));
        w -= h(j, k) * v.col(j);
      }
      h(k + 1, k) = w.norm();
      for (int j = 0; j < k; ++j) {
        const double t = cs(j) * h(j, k) + sn(j) * h(j + 1, k);
        h(j + 1, k) = -sn(j) * h(j, k) + cs(j) * h(j + 1, k);
        h(j, k) = t;
      }
      const double rho = std::hypot(h(k, k), h(k + 1, k));
      const bool breakdown = h(k + 1, k) <= 1e-14 * rho;
      if (!breakdown) v.col(k + 1) = w / h(k + 1, k);
      cs(k) = rho == 0.0 ? 1.0 : h(k, k) / rho;
      sn(k) = rho == 0.0 ? 0.0 : h(k + 1, k) / rho;
      h(k, k) = rho;
      h(k + 1, k) = 0.0;
      g(k + 1) = -sn(k) * g(k);
      g(k) = cs(k) * g(k);
      used = k + 1;
      if (std::abs(g(k + 1)) <= target || breakdown) break;
    }
    const Vector y = h.topLeftCorner(used, used).triangularView<Eigen::Upper>().solve(g.head(used));
    x += v.leftCols(used) * y;
    if (std::abs(g(used)) <= target) break;
  }
  return x;
}

Vector minres(const std::function<Vector(const Vector&)>& apply, const Vector& b, double relative_tolerance,
              int max_iterations) {
  const Eigen::Index dim = b.size();
  Vector x = Vector::Zero(dim);
  const double beta1 = b.norm();
  if (beta1 == 0.0) return x;

  Vector r1 = b, r2 = b, y = b;
  Vector w = Vector::Zero(dim), w1 = Vector::Zero(dim), w2 = Vector::Zero(dim);
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0, tnorm2 = 0.0;
  constexpr double tiny = 1e-300;

  for (int it = 1; it <= max_iterations; ++it) {
    const Vector v = y / beta;
    y = apply(v);
    if (it >= 2) y -= (beta / oldb) * r1;
    const double alpha = v.dot(y);
    y -= (alpha / beta) * r2;
    r1 = r2;
    r2 = y;
    oldb = beta;
    beta = r2.norm();
    tnorm2 += alpha * alpha + oldb * oldb + beta * beta;

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alpha;
    const double gbar = sn * dbar - cs * alpha;
    epsln = sn * beta;
    dbar = -cs * beta;
    // |A r| of the previous iterate; once negligible the system is
    // inconsistent and x already solves it in the least-squares sense.
    const double arnorm = phibar * std::hypot(gbar, dbar);
    if (it > 1 && arnorm <= 1e-14 * std::sqrt(tnorm2) * phibar) break;
    const double gamma = std::max(std::hypot(gbar, beta), tiny);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;

    if (phibar <= relative_tolerance * beta1) break;
    if (beta <= tiny) break;
  }
  return x;
}

NewtonKrylovResult newton_krylov(const ResidualFunction& F, Vector x0, const NewtonKrylovOptions& opts) {
  NewtonKrylovResult res;
  res.x = std::move(x0);
  res.f = F(res.x);
  if (!res.f.allFinite()) {
    res.status = "non-finite";
    return res;
  }
  double fmax = res.f.cwiseAbs().maxCoeff();
  res.trace.push_back(fmax);

  for (int it = 0; it < opts.max_outer; ++it) {
    if (fmax <= opts.tolerance) break;
    const Vector& x = res.x;
    const double xscale = std::max(1.0, x.norm());
    auto jv = [&](const Vector& v) -> Vector {
      const double vn = v.norm();
      if (vn == 0.0) return Vector::Zero(v.size());
      const double eps = opts.fd_step * xscale / vn;
      return (F(x + eps * v) - F(x - eps * v)) / (2.0 * eps);
    };

    Vector d;
    if (opts.inner == InnerSolver::gmres) {
      d = gmres(jv, -res.f, opts.krylov);
    } else {
      d = minres(jv, -res.f, opts.krylov.relative_tolerance, opts.krylov.subspace * (opts.krylov.max_restarts + 1));
    }

    const double f0 = res.f.norm();
    double alpha = 1.0;
    Vector xt, ft;
    bool accepted = false;
    const int trials = opts.backtracking ? opts.max_backtracks : 0;
    for (int t = 0; t <= trials; ++t) {
      xt = x + alpha * d;
      ft = F(xt);
      if (ft.allFinite() && (!opts.backtracking || ft.norm() < f0)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.status = ft.allFinite() ? "stalled" : "non-finite";
      res.iterations = it;
      res.converged = false;
      return res;
    }
    res.x = std::move(xt);
    res.f = std::move(ft);
    fmax = res.f.cwiseAbs().maxCoeff();
    res.trace.push_back(fmax);
    res.iterations = it + 1;
    if (opts.on_step) opts.on_step(res.iterations, res.x, fmax);
  }
  res.converged = fmax <= opts.tolerance;
  res.status = res.converged ? "converged" : "max-iterations";
  return res;
}

}  // namespace acmp
