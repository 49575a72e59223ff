#pragma once

#include "acmp/lagrangian.hpp"

namespace acmp {

/// Augmented-Lagrangian minimization over the ACMP columns:
///   min_x E(x) - m.c(x) + rho/2 |c(x)|^2,  then m <- m - rho c(x)
/// with rho raised whenever the violation fails to shrink by 4x.
/// Inner problems use L-BFGS.
struct DescentOptions {
  bool enabled = true;
  int max_rounds = 30;
  int max_iterations = 2000;  // L-BFGS iterations per round
  double initial_penalty = 10.0;
  double penalty_growth = 4.0;
  /// Rounds stop once the penalty would pass this value.
  double max_penalty = 1e8;
  double feasibility_tolerance = 1e-9;
  /// Uniform noise added to the columns before descending, in [-p, p].
  double perturbation = 1e-2;
};

struct DescentResult {
  Vector x;  // least-violating round; multipliers are that round's estimates
  int rounds = 0;
  int iterations = 0;
  double violation = 0.0;  // |c|_inf at the returned point
  double penalty = 0.0;
};

DescentResult augmented_lagrangian_descent(const Lagrangian& lag, const Vector& x0, const DescentOptions& opts);

}  // namespace acmp
