#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sempath/model.hpp"

namespace sempath {

enum class Algorithm { admm, ppxa };

std::string_view to_string(Algorithm a);
/// Accepts "admm" / "ppxa" (case-insensitive); throws std::invalid_argument.
Algorithm parse_algorithm(std::string_view name);

struct SolverOptions {
  Algorithm algorithm = Algorithm::admm;
  /// ADMM penalty. Empty means automatic: 1 on a scaled problem, otherwise
  /// 1 / lambda_min(S).
  std::optional<double> rho;
  double ppxa_gamma = 0.1;
  double ppxa_lambda = 1.8;
  /// Threshold on the relative-change stopping metric.
  double tol = 1e-5;
  int max_iter = 10000;
  /// Solve the problem rescaled so that lambda_min(S) = 1, then map back.
  bool scale = true;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

/// Residuals of the optimality conditions, each made dimensionless:
///  - stationarity   ||X1 - (S - Z1)^{-1}||_F / max(1, ||X1||_F)
///  - primal_feas    max of: PSD violation of X relative to max(1, lambda_max(X)),
///                   absolute violation of 0 <= X4 <= alpha I, max |P(X2) - I|
///  - dual_feas      max of: max(0, ||P^c(Z2)||_max - gamma), relative PSD violation of Z
///  - comp_slack     max of ||ZX||_F and ||Z4 (X4 - alpha I)||_F, each over
///                   max(1, product of factor norms)
struct KktDiagnostics {
  double stationarity = 0.0;
  double primal_feas = 0.0;
  double dual_feas = 0.0;
  double comp_slack = 0.0;

  double worst() const;
};

struct SolveReport {
  BlockVariable x;       // primal solution
  BlockVariable z_dual;  // estimate of the multiplier of X >= 0
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;
  /// Objective of the returned-form iterate at each iteration, in the units
  /// of the original (unscaled) problem.
  std::vector<double> objective_history;
  KktDiagnostics kkt;
  double lowrank_gap = 0.0;
  Algorithm algorithm = Algorithm::admm;
};

/// Consensus ADMM over f1 + f2 + f3 (log-det/box, l1/pattern, PSD cone).
SolveReport solve_admm(const Problem& problem, const SolverOptions& opts);

/// Parallel proximal algorithm with uniform weights 1/3 over the same split.
SolveReport solve_ppxa(const Problem& problem, const SolverOptions& opts);

/// Dispatches on opts.algorithm.
SolveReport solve(const Problem& problem, const SolverOptions& opts);

struct ScaledProblem {
  Problem problem;
  double beta;
};

/// S -> beta S, alpha -> beta alpha with beta = 1 / lambda_min(S); gamma kept.
ScaledProblem scale_problem(const Problem& problem);

struct PrimalDual {
  BlockVariable x;
  BlockVariable z;
};

/// Maps a solution of the scaled problem back:
/// X1 = beta X1~, X2 = X2~, X4 = X4~ / beta, Z1 = Z1~ / beta, Z2 = Z2~, Z4 = beta Z4~.
PrimalDual unscale_solution(const BlockVariable& x_scaled, const BlockVariable& z_scaled, double beta);
/// The forward map (inverse of unscale_solution).
PrimalDual scale_solution(const BlockVariable& x, const BlockVariable& z, double beta);

KktDiagnostics kkt_check(const Problem& problem, const BlockVariable& x, const BlockVariable& z);

/// -log det X1 + tr(S X1) + 2 gamma sum_{not in pattern} |X2_ij|. Returns
/// +infinity when X1 is not positive definite.
double primal_objective(const Problem& problem, const BlockVariable& x);

/// log det(S - Z1) - 2 tr(Z2) - alpha tr(Z4) + n. Returns -infinity when
/// S - Z1 is not positive definite.
double dual_objective(const Problem& problem, const BlockVariable& z);

/// Pushes Z into {Z >= 0, ||P^c(Z2)||_max <= gamma} with Dykstra's
/// alternating projections.
BlockVariable project_dual_feasible(const Problem& problem, const BlockVariable& z,
                                    int max_sweeps = 500);

/// [[S^{-1}, 0], [0, alpha I]].
BlockVariable initial_point(const Problem& problem);

}  // namespace sempath
