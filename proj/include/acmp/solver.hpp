#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "acmp/acmp.hpp"
#include "acmp/descent.hpp"
#include "acmp/hamiltonian.hpp"
#include "acmp/lagrangian.hpp"
#include "acmp/newton_krylov.hpp"

namespace acmp {

struct SolverOptions {
  int max_outer = 200;               // Newton iterations
  double gradient_tolerance = 1e-10;  // |grad L|_inf
  KrylovOptions krylov;
  int damping = 8;  // step halvings per Newton iteration
  bool backtracking = true;
  double fd_step = 1e-7;
  bool use_symmetrized = false;
  std::uint64_t seed = 0;  // perturbation of the descent start
  DescentOptions descent;
  /// Compute the full-CI energy and RDMs for the report when the sector is small enough.
  bool reference = true;
  /// Written after the descent phase and after every Newton step when set.
  std::optional<std::filesystem::path> checkpoint;
  Tolerances tolerances;
};

struct SolveReport {
  int n = 0;
  int particles = 0;
  double energy = 0.0;
  std::optional<double> reference_energy;
  std::optional<double> energy_error;  // energy - reference
  std::optional<double> rdm1_error;    // max abs deviation from the reference 1-RDM
  std::optional<double> rdm2_error;
  ResidualNorms residuals;
  double gradient_norm = 0.0;  // |grad L|_inf at the returned state
  int iterations = 0;          // Newton iterations
  int descent_rounds = 0;
  int descent_iterations = 0;
  bool converged = false;
  std::string status;
  double wall_seconds = 0.0;
  SolveState state;
};

/// Mean-field start: diagonalize the embedded one-body matrix, occupy the N
/// lowest orbitals (ties keep eigensolver order), build the exact set of
/// that determinant, compact it and fit the multipliers.
SolveState initial_guess(const Hamiltonian& ham, int N, Objective objective = Objective::plain);

struct MultiplierFit {
  Multipliers mult;
  double residual = 0.0;  // |primal gradient|_2 after the fit
};

/// Least-squares multipliers that best zero the primal gradient at a fixed set.
/// Minimum-norm solution when the system is rank deficient.
MultiplierFit multiplier_fit(const AcmpSet& set, const Hamiltonian& ham, Objective objective = Objective::plain);

SolveReport solve(const Hamiltonian& ham, int N, const SolverOptions& opts = {});

/// Newton refinement from a given state (warm start or resumed checkpoint);
/// no descent phase.
SolveReport refine(const Hamiltonian& ham, const SolveState& start, const SolverOptions& opts = {});

void save_checkpoint(const SolveState& state, const std::filesystem::path& path);
SolveState load_checkpoint(const std::filesystem::path& path);

}  // namespace acmp
