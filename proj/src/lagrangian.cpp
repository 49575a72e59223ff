#include "acmp/lagrangian.hpp"

#include <algorithm>
#include <random>

namespace acmp {

Multipliers Multipliers::zero(int n) {
  return {Matrix::Zero(n, n), Tensor4(n), 0.0, Matrix::Zero(n, n)};
}

Layout::Layout(int n, int N) : Layout(n, N, SetShape::minimal(n, N)) {}

Layout::Layout(int n, int N, const SetShape& shape) : n_(n), N_(N), shape_(shape) {
  if (n < 2 || N < 2 || N >= n) throw DimensionError("Lagrangian sectors need 2 <= N < n");
  const Eigen::Index nn = n;
  const auto pairs = static_cast<Eigen::Index>(binomial(n, 2));
  c0_ = shape.d0_a * nn;
  ca_ = c0_ + shape.d0_c * nn;
  cc_ = ca_ + shape.child_a * pairs;
  lam_ = cc_ + shape.child_c * nn * nn;

  for (int i = 0; i < n; ++i)
    for (int ip = i; ip < n; ++ip) pairs_.emplace_back(i, ip);

  tuple_index_.assign(static_cast<std::size_t>(n) * n * n * n, -1);
  auto flat = [n](int i, int ip, int j, int jp) {
    return ((static_cast<std::size_t>(i) * n + ip) * n + j) * n + jp;
  };
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j)
        for (int jp = 0; jp < n; ++jp) {
          if (tuple_index_[flat(i, ip, j, jp)] >= 0) continue;
          const int k = static_cast<int>(tuples_.size());
          tuples_.push_back({i, ip, j, jp});
          tuple_index_[flat(i, ip, j, jp)] = k;
          tuple_index_[flat(ip, i, jp, j)] = k;
        }

  big_lam_ = lam_ + static_cast<Eigen::Index>(pairs_.size());
  mu0_ = big_lam_ + static_cast<Eigen::Index>(tuples_.size());
  mu_ = mu0_ + 1;
  size_ = mu_ + static_cast<Eigen::Index>(pairs_.size());
}

int Layout::Lambda_index(int i, int ip, int j, int jp) const {
  const auto n = static_cast<std::size_t>(n_);
  return tuple_index_[((static_cast<std::size_t>(i) * n + ip) * n + j) * n + jp];
}

Vector Layout::flatten_set(const AcmpSet& set) const {
  if (set.n() != n_ || set.particles() != N_) throw DimensionError("set does not match the layout sector");
  if (!(set.shape() == shape_)) throw DimensionError("set row counts do not match the layout");
  Vector x(lam_);
  x.segment(0, c0_) = set.d0().A.reshaped();
  x.segment(c0_, ca_ - c0_) = set.d0().C.reshaped();
  x.segment(ca_, cc_ - ca_) = set.child_a().reshaped();
  x.segment(cc_, lam_ - cc_) = set.child_c().reshaped();
  return x;
}

AcmpSet Layout::unflatten_set(const Eigen::Ref<const Vector>& p) const {
  if (p.size() < lam_) throw DimensionError("flat vector is shorter than the primal block");
  const int n = n_;
  const auto pairs = static_cast<Eigen::Index>(binomial(n, 2));
  Acmp d0;
  d0.N = N_;
  d0.tau = 1.0;
  d0.A = p.segment(0, c0_).reshaped(shape_.d0_a, n);
  d0.C = p.segment(c0_, ca_ - c0_).reshaped(shape_.d0_c, n);
  Matrix a = p.segment(ca_, cc_ - ca_).reshaped(shape_.child_a, pairs);
  Matrix c = p.segment(cc_, lam_ - cc_).reshaped(shape_.child_c, static_cast<Eigen::Index>(n) * n);
  return AcmpSet(std::move(d0), std::move(a), std::move(c));
}

Vector Layout::flatten_multipliers(const Multipliers& m) const {
  Vector v(size_ - lam_);
  Eigen::Index k = 0;
  for (const auto& [i, ip] : pairs_) v(k++) = m.lambda(i, ip);
  for (const auto& t : tuples_) v(k++) = m.Lambda(t[0], t[1], t[2], t[3]);
  v(k++) = m.mu0;
  for (const auto& [i, ip] : pairs_) v(k++) = m.mu(i, ip);
  return v;
}

Multipliers Layout::unflatten_multipliers(const Eigen::Ref<const Vector>& v) const {
  if (v.size() != size_ - lam_) throw DimensionError("multiplier block has the wrong length");
  Multipliers m = Multipliers::zero(n_);
  Eigen::Index k = 0;
  for (const auto& [i, ip] : pairs_) {
    m.lambda(i, ip) = m.lambda(ip, i) = v(k++);
  }
  for (const auto& t : tuples_) {
    m.Lambda(t[0], t[1], t[2], t[3]) = v(k);
    m.Lambda(t[1], t[0], t[3], t[2]) = v(k);
    ++k;
  }
  m.mu0 = v(k++);
  for (const auto& [i, ip] : pairs_) {
    m.mu(i, ip) = m.mu(ip, i) = v(k++);
  }
  return m;
}

Vector Layout::flatten(const SolveState& s) const {
  Vector x(size_);
  x.head(lam_) = flatten_set(s.set);
  x.tail(size_ - lam_) = flatten_multipliers(s.mult);
  return x;
}

SolveState Layout::unflatten(const Vector& x) const {
  if (x.size() != size_) throw DimensionError("flat vector has the wrong length");
  return {unflatten_set(x.head(lam_)), unflatten_multipliers(x.tail(size_ - lam_))};
}

Lagrangian::Lagrangian(Hamiltonian ham, int N, Objective objective)
    : Lagrangian(ham, N, objective, SetShape::minimal(ham.n, N)) {}

Lagrangian::Lagrangian(Hamiltonian ham, int N, Objective objective, const SetShape& shape)
    : ham_(std::move(ham)), N_(N), objective_(objective), layout_(ham_.n, N, shape) {
  const int n = ham_.n;
  if (objective_ == Objective::plain) {
    h_eff_ = ham_.h1;
    h2_pair_ = ham_.h2.as_pair_matrix();
  } else {
    h_eff_ = 0.5 * ham_.h1;
    for (int i = 0; i < n; ++i)
      for (int ip = 0; ip < n; ++ip)
        for (int j = 0; j < n; ++j) h_eff_(i, ip) += 0.25 * ham_.h2(i, ip, j, j);
    h2_pair_ = 0.5 * ham_.h2.as_pair_matrix();
    energy_const_ = h_eff_.trace();
  }
}

Grams Lagrangian::grams(const Eigen::Ref<const Vector>& primal) const {
  const AcmpSet set = layout_.unflatten_set(primal);
  const Matrix af = set.a_full();
  Grams g;
  g.g = set.d0().A.transpose() * set.d0().A;
  g.k = set.d0().C.transpose() * set.d0().C;
  g.s.noalias() = af.transpose() * af;
  g.t.noalias() = set.child_c().transpose() * set.child_c();
  return g;
}

Vector Lagrangian::residuals(const Grams& gr) const {
  const int n = layout_.n();
  const int N = N_;
  const bool sym = objective_ == Objective::symmetrized;
  Vector c(layout_.multiplier_size());
  Eigen::Index k = 0;

  auto lam_b = [&](int i, int ip) { return gr.g(i, ip) + gr.k(ip, i) - (i == ip ? 1.0 : 0.0); };
  for (const auto& [i, ip] : layout_.pair_entries()) c(k++) = i == ip ? lam_b(i, i) : lam_b(i, ip) + lam_b(ip, i);

  auto big_b = [&](int i, int ip, int j, int jp) {
    double v = gr.s(i * n + j, ip * n + jp) + gr.t(i * n + jp, ip * n + j);
    if (j == jp) v -= gr.g(i, ip);
    return v;
  };
  for (const auto& t : layout_.Lambda_entries()) {
    const bool self = t[0] == t[1] && t[2] == t[3];
    c(k++) = self ? big_b(t[0], t[1], t[2], t[3]) : big_b(t[0], t[1], t[2], t[3]) + big_b(t[1], t[0], t[3], t[2]);
  }

  c(k++) = sym ? gr.g.trace() - gr.k.trace() - (2.0 * N - n) : gr.g.trace() - N;

  const double target = sym ? 2.0 * (N - 1) - n : N - 1.0;
  auto mu_b = [&](int i, int ip) {
    double v = 0.0;
    for (int j = 0; j < n; ++j) {
      v += gr.s(i * n + j, ip * n + j);
      if (sym) v -= gr.t(i * n + j, ip * n + j);
    }
    return v - target * gr.g(i, ip);
  };
  for (const auto& [i, ip] : layout_.pair_entries()) c(k++) = i == ip ? mu_b(i, i) : mu_b(i, ip) + mu_b(ip, i);
  return c;
}

double Lagrangian::objective_energy(const Grams& gr) const {
  const int n = layout_.n();
  if (objective_ == Objective::plain) return physical_energy(gr);
  double e = energy_const_ + (h_eff_.array() * (gr.g - gr.k).array()).sum() + (h2_pair_.array() * gr.s.array()).sum();
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j)
        for (int jp = 0; jp < n; ++jp) e -= h2_pair_(i * n + j, ip * n + jp) * gr.t(i * n + jp, ip * n + j);
  return e;
}

double Lagrangian::physical_energy(const Grams& gr) const {
  return (ham_.h1.array() * gr.g.array()).sum() + (ham_.h2.as_pair_matrix().array() * gr.s.array()).sum();
}

Lagrangian::Weights Lagrangian::weights(const Eigen::Ref<const Vector>& mult, bool with_energy) const {
  const int n = layout_.n();
  const int N = N_;
  const int n2 = n * n;
  const bool sym = objective_ == Objective::symmetrized;
  const Multipliers m = layout_.unflatten_multipliers(mult);

  Weights w;
  w.a0 = Matrix::Zero(n, n);
  w.c0 = Matrix::Zero(n, n);
  w.a = Matrix::Zero(n2, n2);
  w.c = Matrix::Zero(n2, n2);
  if (with_energy) {
    w.a0 = h_eff_;
    w.a = h2_pair_;
    if (sym) {
      w.c0 = -h_eff_;
      for (int i = 0; i < n; ++i)
        for (int ip = 0; ip < n; ++ip)
          for (int j = 0; j < n; ++j)
            for (int jp = 0; jp < n; ++jp) w.c(i * n + jp, ip * n + j) -= h2_pair_(i * n + j, ip * n + jp);
    }
  }

  w.a0 -= m.lambda;
  w.c0 -= m.lambda;

  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j) {
        w.a0(i, ip) += m.Lambda(i, ip, j, j);
        for (int jp = 0; jp < n; ++jp) {
          const double v = m.Lambda(i, ip, j, jp);
          w.a(i * n + j, ip * n + jp) -= v;
          w.c(i * n + jp, ip * n + j) -= v;
        }
      }

  w.a0.diagonal().array() -= m.mu0;
  if (sym) w.c0.diagonal().array() += m.mu0;

  w.a0 += (sym ? 2.0 * (N - 1) - n : N - 1.0) * m.mu;
  for (int i = 0; i < n; ++i)
    for (int ip = 0; ip < n; ++ip)
      for (int j = 0; j < n; ++j) {
        w.a(i * n + j, ip * n + j) -= m.mu(i, ip);
        if (sym) w.c(i * n + j, ip * n + j) += m.mu(i, ip);
      }
  return w;
}

Vector Lagrangian::primal_gradient(const Eigen::Ref<const Vector>& primal, const Eigen::Ref<const Vector>& mult,
                                   bool with_energy) const {
  const int n = layout_.n();
  const AcmpSet set = layout_.unflatten_set(primal);
  const Weights w = weights(mult, with_energy);

  const Matrix ga0 = set.d0().A * (w.a0 + w.a0.transpose());
  const Matrix gc0 = set.d0().C * (w.c0 + w.c0.transpose());
  const Matrix wa = w.a + w.a.transpose();
  const Matrix gfull = set.a_full() * wa;
  Matrix gca(gfull.rows(), set.pair_count());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      gca.col(AcmpSet::pair_index(i, j, n)) = gfull.col(i * n + j) - gfull.col(j * n + i);
  const Matrix wc = w.c + w.c.transpose();
  const Matrix gcc = set.child_c() * wc;

  Vector g(layout_.primal_size());
  g.segment(0, layout_.c0_offset()) = ga0.reshaped();
  g.segment(layout_.c0_offset(), layout_.child_a_offset() - layout_.c0_offset()) = gc0.reshaped();
  g.segment(layout_.child_a_offset(), layout_.child_c_offset() - layout_.child_a_offset()) = gca.reshaped();
  g.segment(layout_.child_c_offset(), layout_.primal_size() - layout_.child_c_offset()) = gcc.reshaped();
  return g;
}

double Lagrangian::value(const Vector& x) const {
  if (x.size() != layout_.size()) throw DimensionError("flat vector has the wrong length");
  const auto p = layout_.primal_size();
  const Grams gr = grams(x.head(p));
  return objective_energy(gr) - x.tail(x.size() - p).dot(residuals(gr));
}

Vector Lagrangian::gradient(const Vector& x) const {
  if (x.size() != layout_.size()) throw DimensionError("flat vector has the wrong length");
  const auto p = layout_.primal_size();
  Vector g(x.size());
  g.head(p) = primal_gradient(x.head(p), x.tail(x.size() - p));
  g.tail(x.size() - p) = -residuals(grams(x.head(p)));
  return g;
}

GradCheckReport grad_check(const Lagrangian& lag, const Vector& x, double step, int count, std::uint64_t seed) {
  if (!(step > 0.0)) throw Error("grad_check step must be positive");
  const Vector g = lag.gradient(x);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, x.size() - 1);
  GradCheckReport r;
  Vector probe = x;
  for (int s = 0; s < count; ++s) {
    const Eigen::Index k = count >= x.size() ? s % x.size() : pick(rng);
    probe(k) = x(k) + step;
    const double fp = lag.value(probe);
    probe(k) = x(k) - step;
    const double fm = lag.value(probe);
    probe(k) = x(k);
    const double fd = (fp - fm) / (2.0 * step);
    const double err = std::abs(fd - g(k)) / std::max(1.0, std::abs(g(k)));
    if (err > r.max_relative_error || r.worst_index < 0) {
      r.max_relative_error = err;
      r.worst_index = k;
    }
    ++r.samples;
  }
  return r;
}

Vector random_point(const Layout& layout, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-scale, scale);
  Vector x(layout.size());
  for (auto& v : x) v = unit(rng);
  return x;
}

}  // namespace acmp
