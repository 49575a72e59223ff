#include "acmp/descent.hpp"

#include <ceres/ceres.h>

#include <limits>

namespace acmp {
namespace {

class PenaltyFunction final : public ceres::FirstOrderFunction {
 public:
  PenaltyFunction(const Lagrangian& lag, const Vector& mult, double rho) : lag_(lag), mult_(mult), rho_(rho) {}

  bool Evaluate(const double* parameters, double* cost, double* gradient) const override {
    const auto p = lag_.layout().primal_size();
    const Eigen::Map<const Vector> x(parameters, p);
    const Grams g = lag_.grams(x);
    const Vector c = lag_.residuals(g);
    cost[0] = lag_.objective_energy(g) - mult_.dot(c) + 0.5 * rho_ * c.squaredNorm();
    if (gradient != nullptr) Eigen::Map<Vector>(gradient, p) = lag_.primal_gradient(x, mult_ - rho_ * c);
    return std::isfinite(cost[0]);
  }

  int NumParameters() const override { return static_cast<int>(lag_.layout().primal_size()); }

 private:
  const Lagrangian& lag_;
  const Vector& mult_;
  double rho_;
};

}  // namespace

DescentResult augmented_lagrangian_descent(const Lagrangian& lag, const Vector& x0, const DescentOptions& opts) {
  const Layout& lay = lag.layout();
  if (x0.size() != lay.size()) throw DimensionError("descent start has the wrong length");
  const auto p = lay.primal_size();

  DescentResult res;
  Vector primal = x0.head(p);
  Vector mult = x0.tail(lay.multiplier_size());
  double rho = opts.initial_penalty;
  res.penalty = rho;
  double previous = 0.0;

  ceres::GradientProblemSolver::Options so;
  so.line_search_direction_type = ceres::LBFGS;
  so.max_lbfgs_rank = 10;
  so.max_num_iterations = opts.max_iterations;
  so.function_tolerance = 1e-15;
  so.gradient_tolerance = 1e-11;
  so.parameter_tolerance = 1e-15;
  so.logging_type = ceres::SILENT;
  so.minimizer_progress_to_stdout = false;

  Vector best_primal = primal, best_mult = mult;
  double best = std::numeric_limits<double>::infinity();
  for (int round = 0; round < opts.max_rounds; ++round) {
    ceres::GradientProblem problem(new PenaltyFunction(lag, mult, rho));
    ceres::GradientProblemSolver::Summary summary;
    ceres::Solve(so, problem, primal.data(), &summary);
    res.iterations += static_cast<int>(summary.iterations.size());
    res.rounds = round + 1;

    const Vector c = lag.residuals(lag.grams(primal));
    if (!c.allFinite()) break;
    mult -= rho * c;
    const double violation = c.cwiseAbs().maxCoeff();
    if (violation < best) {
      best = violation;
      best_primal = primal;
      best_mult = mult;
      res.penalty = rho;
    }
    if (violation < opts.feasibility_tolerance) break;
    if (round > 0 && violation > 0.25 * previous) {
      if (rho * opts.penalty_growth > opts.max_penalty) break;
      rho *= opts.penalty_growth;
    }
    previous = violation;
  }

  res.violation = best;
  res.x.resize(lay.size());
  res.x.head(p) = best_primal;
  res.x.tail(lay.multiplier_size()) = best_mult;
  return res;
}

}  // namespace acmp
