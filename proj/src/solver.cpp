#include "acmp/solver.hpp"

#include <chrono>
#include <fstream>
#include <random>

#include "acmp/fock.hpp"
#include "acmp/serialize.hpp"

namespace acmp {
namespace {

// Dense least squares is used while the multiplier Jacobian stays below this many entries.
constexpr double dense_fit_limit = 2.5e7;
constexpr std::size_t reference_limit = 3000;

Vector fit_dense(const Lagrangian& lag, const Vector& primal, const Vector& g0) {
  const Eigen::Index k = lag.layout().multiplier_size();
  const Vector zero = Vector::Zero(k);
  Matrix b(primal.size(), k);
  Vector e = Vector::Zero(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    e(j) = 1.0;
    b.col(j) = lag.primal_gradient(primal, e, false);
    e(j) = 0.0;
  }
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(b);
  cod.setThreshold(1e-12);
  return cod.solve(-g0);
}

// CGLS on min |B m + g0| with B m from the multiplier-linear gradient and
// B^T v from the exact central difference of the quadratic residuals.
Vector fit_iterative(const Lagrangian& lag, const Vector& primal, const Vector& g0) {
  const double xscale = std::max(1.0, primal.norm());
  auto apply = [&](const Vector& m) { return lag.primal_gradient(primal, m, false); };
  auto apply_t = [&](const Vector& v) -> Vector {
    const double vn = v.norm();
    if (vn == 0.0) return Vector::Zero(lag.layout().multiplier_size());
    const double eps = xscale / vn;
    const Vector cp = lag.residuals(lag.grams(primal + eps * v));
    const Vector cm = lag.residuals(lag.grams(primal - eps * v));
    return -(cp - cm) / (2.0 * eps);
  };
  Vector m = Vector::Zero(lag.layout().multiplier_size());
  Vector r = -g0;
  Vector s = apply_t(r);
  Vector p = s;
  double gamma = s.squaredNorm();
  const double stop = 1e-14 * std::max(1.0, gamma);
  for (int it = 0; it < 2000 && gamma > stop; ++it) {
    const Vector q = apply(p);
    const double qq = q.squaredNorm();
    if (!(qq > 0.0)) break;
    const double alpha = gamma / qq;
    m += alpha * p;
    r -= alpha * q;
    s = apply_t(r);
    const double gamma_new = s.squaredNorm();
    p = s + (gamma_new / gamma) * p;
    gamma = gamma_new;
  }
  return m;
}

Vector fit(const Lagrangian& lag, const Vector& primal, double* residual) {
  const Layout& lay = lag.layout();
  const Vector g0 = lag.primal_gradient(primal, Vector::Zero(lay.multiplier_size()));
  const double entries = static_cast<double>(primal.size()) * static_cast<double>(lay.multiplier_size());
  Vector m = entries <= dense_fit_limit ? fit_dense(lag, primal, g0) : fit_iterative(lag, primal, g0);
  if (residual != nullptr) *residual = lag.primal_gradient(primal, m).norm();
  return m;
}

void check_sector(const Hamiltonian& ham, int N) {
  if (N < 2 || N >= ham.n)
    throw DimensionError("solver sectors need 2 <= N < n (got n=" + std::to_string(ham.n) + ", N=" + std::to_string(N) +
                         ")");
}

NewtonKrylovOptions newton_options(const SolverOptions& opts) {
  NewtonKrylovOptions o;
  o.max_outer = opts.max_outer;
  o.tolerance = opts.gradient_tolerance;
  o.krylov = opts.krylov;
  o.inner = InnerSolver::minres;
  o.max_backtracks = opts.damping;
  o.backtracking = opts.backtracking;
  o.fd_step = opts.fd_step;
  return o;
}

// Newton phase plus report assembly; shared by solve() and refine().
SolveReport finish(const Lagrangian& lag, Vector x, const SolverOptions& opts,
                   std::chrono::steady_clock::time_point t0, SolveReport rep) {
  const Layout& lay = lag.layout();
  NewtonKrylovOptions no = newton_options(opts);
  if (opts.checkpoint)
    no.on_step = [&](int, const Vector& xs, double) { save_checkpoint(lay.unflatten(xs), *opts.checkpoint); };
  const NewtonKrylovResult nk = newton_krylov([&](const Vector& v) { return lag.gradient(v); }, std::move(x), no);

  rep.n = lay.n();
  rep.particles = lay.particles();
  rep.state = lay.unflatten(nk.x);
  rep.iterations = nk.iterations;
  rep.converged = nk.converged;
  rep.status = nk.status;
  rep.gradient_norm = nk.trace.empty() ? 0.0 : nk.trace.back();
  const Grams g = lag.grams(nk.x.head(lay.primal_size()));
  rep.energy = lag.physical_energy(g);
  rep.residuals = set_residuals(rep.state.set).norms();

  const Hamiltonian& ham = lag.hamiltonian();
  if (opts.reference && binomial(ham.n, lay.particles()) <= reference_limit) {
    const GroundState gs = ground_state(ham, lay.particles());
    rep.reference_energy = gs.energy;
    rep.energy_error = rep.energy - gs.energy;
    rep.rdm1_error = (rdm1_from(rep.state.set) - rdm1_of(gs.psi)).cwiseAbs().maxCoeff();
    rep.rdm2_error = (rdm2_from(rep.state.set) - rdm2_of(gs.psi)).max_abs();
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

Objective objective_of(const SolverOptions& opts) {
  return opts.use_symmetrized ? Objective::symmetrized : Objective::plain;
}

}  // namespace

MultiplierFit multiplier_fit(const AcmpSet& set, const Hamiltonian& ham, Objective objective) {
  check_sector(ham, set.particles());
  const Lagrangian lag(ham, set.particles(), objective, set.shape());
  MultiplierFit out;
  const Vector m = fit(lag, lag.layout().flatten_set(set), &out.residual);
  out.mult = lag.layout().unflatten_multipliers(m);
  return out;
}

SolveState initial_guess(const Hamiltonian& ham, int N, Objective objective) {
  check_sector(ham, N);
  const Hamiltonian emb = embed_one_body(ham, N);
  Eigen::SelfAdjointEigenSolver<Matrix> es(emb.h1);
  const Wavefunction det = slater_determinant(es.eigenvectors().leftCols(N));
  AcmpSet set = compact(acmp_set_from_wavefunction(det));
  Multipliers mult = multiplier_fit(set, ham, objective).mult;
  return {std::move(set), std::move(mult)};
}

SolveReport solve(const Hamiltonian& ham, int N, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  check_sector(ham, N);
  const Lagrangian lag(ham, N, objective_of(opts));
  const Layout& lay = lag.layout();
  Vector x = lay.flatten(initial_guess(ham, N, lag.objective()));

  SolveReport rep;
  const double start = lag.gradient(x).cwiseAbs().maxCoeff();
  if (opts.descent.enabled && start > opts.gradient_tolerance) {
    const auto p = lay.primal_size();
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> noise(-opts.descent.perturbation, opts.descent.perturbation);
    for (Eigen::Index k = 0; k < p; ++k) x(k) += noise(rng);
    x.tail(lay.multiplier_size()).setZero();

    const DescentResult d = augmented_lagrangian_descent(lag, x, opts.descent);
    rep.descent_rounds = d.rounds;
    rep.descent_iterations = d.iterations;
    x = d.x;
    if (opts.checkpoint) save_checkpoint(lay.unflatten(x), *opts.checkpoint);
  }
  return finish(lag, std::move(x), opts, t0, std::move(rep));
}

SolveReport refine(const Hamiltonian& ham, const SolveState& start, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  check_sector(ham, start.set.particles());
  const Lagrangian lag(ham, start.set.particles(), objective_of(opts), start.set.shape());
  return finish(lag, lag.layout().flatten(start), opts, t0, SolveReport{});
}

void save_checkpoint(const SolveState& state, const std::filesystem::path& path) {
  const Layout lay(state.set.n(), state.set.particles(), state.set.shape());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error("cannot open " + tmp.string() + " for writing");
    write_set(os, state.set);
    write_block(os, "MULT", lay.flatten_multipliers(state.mult));
    if (!os) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

SolveState load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path.string());
  AcmpSet set = read_set(is);
  const Layout lay(set.n(), set.particles(), set.shape());
  const Vector m = read_block(is, "MULT");
  if (m.size() != lay.multiplier_size()) throw ParseError("checkpoint multiplier block has the wrong length");
  return {std::move(set), lay.unflatten_multipliers(m)};
}

}  // namespace acmp
