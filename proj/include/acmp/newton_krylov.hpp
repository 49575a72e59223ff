#pragma once

#include <functional>
#include <string>
#include <vector>

#include "acmp/types.hpp"

namespace acmp {

using ResidualFunction = std::function<Vector(const Vector&)>;

enum class InnerSolver {
  gmres,   // restarted GMRES
  minres,  // MINRES; needs a symmetric Jacobian, tolerates singular ones
};

struct KrylovOptions {
  int subspace = 30;
  double relative_tolerance = 1e-3;
  int max_restarts = 10;
};

struct NewtonKrylovOptions {
  int max_outer = 200;
  double tolerance = 1e-10;  // on the infinity norm of F
  KrylovOptions krylov;
  InnerSolver inner = InnerSolver::gmres;
  int max_backtracks = 8;
  bool backtracking = true;
  /// Jacobian-vector products use central differences with
  /// eps = fd_step * max(1, |x|) / |v|.
  double fd_step = 1e-7;
  /// Called after every accepted step with (iteration, x, |F|_inf).
  std::function<void(int, const Vector&, double)> on_step;
};

struct NewtonKrylovResult {
  Vector x;
  Vector f;
  std::vector<double> trace;  // |F|_inf, starting with the initial point
  int iterations = 0;
  bool converged = false;
  std::string status;  // "converged", "max-iterations", "stalled", "non-finite"
};

NewtonKrylovResult newton_krylov(const ResidualFunction& F, Vector x0, const NewtonKrylovOptions& opts = {});

/// Restarted GMRES for A x = b with x0 = 0. Returns the approximate solution.
Vector gmres(const std::function<Vector(const Vector&)>& apply, const Vector& b, const KrylovOptions& opts);

/// MINRES for a symmetric (possibly singular) operator, x0 = 0. Stops on
/// |b - A x| <= tol |b| or once |A r| is negligible (inconsistent systems).
Vector minres(const std::function<Vector(const Vector&)>& apply, const Vector& b, double relative_tolerance,
              int max_iterations);

}  // namespace acmp
