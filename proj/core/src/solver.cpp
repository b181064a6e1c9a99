#include "sempath/solver.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sempath/error.hpp"
#include "sempath/prox.hpp"

namespace sempath {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CoreResult {
  BlockVariable x;
  BlockVariable z;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;
  std::vector<double> objectives;
};

double relative_change(double now, double prev) {
  if (!std::isfinite(now) || !std::isfinite(prev)) return kInf;
  return std::abs(now - prev) / std::max(1.0, std::abs(now));
}

// Primal point read off the prox outputs: X1 and X4 from the log-det/box map
// (X1 > 0, box exact), X2 from the l1/pattern map (P(X2) = I and exact zeros).
BlockVariable polish(const BlockVariable& from_logdet, const BlockVariable& from_l1) {
  return {from_logdet.x1, from_l1.x2, from_logdet.x4};
}

class IterateTracker {
 public:
  explicit IterateTracker(int max_iter) {
    const auto cap = static_cast<std::size_t>(std::min(max_iter, 100000));
    history_.reserve(cap);
    objectives_.reserve(cap);
  }

  void record(double metric, double objective, int iteration, const BlockVariable& x, const BlockVariable& z) {
    history_.push_back(metric);
    objectives_.push_back(objective);
    if (metric < best_metric_ || !have_best_) {
      best_metric_ = metric;
      best_x_ = x;
      best_z_ = z;
      have_best_ = true;
    }
    last_iteration_ = iteration;
  }

  CoreResult converged(BlockVariable x, BlockVariable z, int iteration) {
    return {std::move(x), std::move(z), iteration, true, std::move(history_), std::move(objectives_)};
  }

  CoreResult exhausted() {
    return {std::move(best_x_), std::move(best_z_), last_iteration_, false, std::move(history_),
            std::move(objectives_)};
  }

 private:
  std::vector<double> history_;
  std::vector<double> objectives_;
  BlockVariable best_x_;
  BlockVariable best_z_;
  double best_metric_ = kInf;
  bool have_best_ = false;
  int last_iteration_ = 0;
};

CoreResult run_admm(const Problem& problem, double rho, const SolverOptions& opts) {
  const ProxParams params(problem, rho);
  const int n = problem.dim();
  BlockVariable z = initial_point(problem);
  std::array<BlockVariable, 3> y{BlockVariable::zero(n), BlockVariable::zero(n), BlockVariable::zero(n)};
  const double inv_rho = 1.0 / rho;
  const double sqrt3 = std::sqrt(3.0);

  IterateTracker tracker(opts.max_iter);
  double prev_objective = std::numeric_limits<double>::quiet_NaN();

  for (int k = 1; k <= opts.max_iter; ++k) {
    std::array<BlockVariable, 3> x{
        prox_logdet_box(z - y[0] * inv_rho, params),
        prox_l1_pattern(z - y[1] * inv_rho, params),
        prox_psd(z - y[2] * inv_rho),
    };
    BlockVariable z_next = (x[0] + x[1] + x[2]) * (1.0 / 3.0);

    double primal_sq = 0.0;
    double x_sq = 0.0;
    double y_sq = 0.0;
    for (int i = 0; i < 3; ++i) {
      const BlockVariable diff = x[i] - z_next;
      primal_sq += diff.squared_norm();
      x_sq += x[i].squared_norm();
      y[i] += diff * rho;
      y_sq += y[i].squared_norm();
    }
    const double step = (z_next - z).norm();
    const double z_norm = z_next.norm();
    const double rel_primal = std::sqrt(primal_sq) / std::max({1.0, sqrt3 * z_norm, std::sqrt(x_sq)});
    const double rel_dual = rho * sqrt3 * step / std::max(1.0, std::sqrt(y_sq));
    const double rel_step = step / std::max(1.0, z_norm);

    BlockVariable candidate = polish(x[0], x[1]);
    const double objective = primal_objective(problem, candidate);
    const double rel_obj = k == 1 ? kInf : relative_change(objective, prev_objective);
    prev_objective = objective;

    const double metric = std::max({rel_obj, rel_step, rel_primal, rel_dual});
    z = std::move(z_next);
    // The multiplier of the PSD split estimates the dual variable Z.
    tracker.record(metric, objective, k, candidate, y[2]);
    if (metric <= opts.tol) return tracker.converged(std::move(candidate), y[2], k);
  }
  return tracker.exhausted();
}

CoreResult run_ppxa(const Problem& problem, const SolverOptions& opts) {
  constexpr double weight = 1.0 / 3.0;
  const double rho = weight / opts.ppxa_gamma;
  const double lambda = opts.ppxa_lambda;
  const ProxParams params(problem, rho);

  BlockVariable x = initial_point(problem);
  std::array<BlockVariable, 3> y{x, x, x};

  IterateTracker tracker(opts.max_iter);
  double prev_objective = std::numeric_limits<double>::quiet_NaN();

  for (int k = 1; k <= opts.max_iter; ++k) {
    std::array<BlockVariable, 3> p{
        prox_logdet_box(y[0], params),
        prox_l1_pattern(y[1], params),
        prox_psd(y[2]),
    };
    // rho (p3 - y3) is minus a subgradient of the cone indicator at p3, i.e.
    // a PSD multiplier complementary to p3.
    BlockVariable z_dual = (p[2] - y[2]) * rho;

    const BlockVariable p_bar = (p[0] + p[1] + p[2]) * weight;
    const BlockVariable reflect = p_bar * 2.0 - x;
    for (int i = 0; i < 3; ++i) y[i] += (reflect - p[i]) * lambda;
    BlockVariable x_next = x + (p_bar - x) * lambda;

    const double rel_step = (x_next - x).norm() / std::max(1.0, x_next.norm());
    x = std::move(x_next);

    BlockVariable candidate = polish(p[0], p[1]);
    const double objective = primal_objective(problem, candidate);
    const double rel_obj = k == 1 ? kInf : relative_change(objective, prev_objective);
    prev_objective = objective;

    const double metric = std::max(rel_obj, rel_step);
    tracker.record(metric, objective, k, candidate, z_dual);
    if (metric <= opts.tol) return tracker.converged(std::move(candidate), std::move(z_dual), k);
  }
  return tracker.exhausted();
}

SolveReport finish(const Problem& problem, CoreResult core, Algorithm algorithm) {
  SolveReport report;
  report.algorithm = algorithm;
  report.x = std::move(core.x);
  report.z_dual = std::move(core.z);
  report.iterations = core.iterations;
  report.converged = core.converged;
  report.residual_history = std::move(core.history);
  report.objective_history = std::move(core.objectives);
  report.objective = primal_objective(problem, report.x);
  report.kkt = kkt_check(problem, report.x, report.z_dual);
  try {
    report.lowrank_gap = lowrank_gap(report.x);
  } catch (const NumericalError&) {
    report.lowrank_gap = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

template <typename Core>
SolveReport solve_with_scaling(const Problem& problem, const SolverOptions& opts, Algorithm algorithm,
                               Core&& core) {
  opts.validate();
  if (!opts.scale) {
    return finish(problem, core(problem, opts.rho.value_or(1.0 / linalg::min_eigenvalue(problem.s()))),
                  algorithm);
  }
  const ScaledProblem scaled = scale_problem(problem);
  CoreResult result = core(scaled.problem, opts.rho.value_or(1.0));
  PrimalDual back = unscale_solution(result.x, result.z, scaled.beta);
  // -log det(beta X1~) = -log det X1~ - n log beta; the other terms are invariant
  const double shift = -problem.dim() * std::log(scaled.beta);
  for (double& f : result.objectives) f += shift;
  result.x = std::move(back.x);
  result.z = std::move(back.z);
  return finish(problem, std::move(result), algorithm);
}

double psd_violation(const Matrix& m) {
  const auto eig = linalg::eigen_sym(m);
  const double lo = eig.values(0);
  const double hi = eig.values(eig.values.size() - 1);
  return std::max(0.0, -lo) / std::max(1.0, hi);
}

}  // namespace

std::string_view to_string(Algorithm a) { return a == Algorithm::admm ? "admm" : "ppxa"; }

Algorithm parse_algorithm(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "admm") return Algorithm::admm;
  if (lower == "ppxa") return Algorithm::ppxa;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) + "' (expected admm or ppxa)");
}

void SolverOptions::validate() const {
  if (rho && !(*rho > 0.0 && std::isfinite(*rho))) throw std::invalid_argument("SolverOptions: rho must be positive");
  if (!(ppxa_gamma > 0.0)) throw std::invalid_argument("SolverOptions: ppxa_gamma must be positive");
  if (!(ppxa_lambda > 0.0 && ppxa_lambda < 2.0)) {
    throw std::invalid_argument("SolverOptions: ppxa_lambda must lie in (0, 2)");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("SolverOptions: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("SolverOptions: max_iter must be at least 1");
}

double KktDiagnostics::worst() const { return std::max({stationarity, primal_feas, dual_feas, comp_slack}); }

BlockVariable initial_point(const Problem& problem) {
  const int n = problem.dim();
  return {linalg::inverse_spd(problem.s()), Matrix::Zero(n, n),
          problem.alpha() * Matrix::Identity(n, n)};
}

SolveReport solve_admm(const Problem& problem, const SolverOptions& opts) {
  return solve_with_scaling(problem, opts, Algorithm::admm,
                            [&opts](const Problem& p, double rho) { return run_admm(p, rho, opts); });
}

SolveReport solve_ppxa(const Problem& problem, const SolverOptions& opts) {
  return solve_with_scaling(problem, opts, Algorithm::ppxa,
                            [&opts](const Problem& p, double) { return run_ppxa(p, opts); });
}

SolveReport solve(const Problem& problem, const SolverOptions& opts) {
  return opts.algorithm == Algorithm::admm ? solve_admm(problem, opts) : solve_ppxa(problem, opts);
}

ScaledProblem scale_problem(const Problem& problem) {
  const double lambda_min = linalg::min_eigenvalue(problem.s());
  if (!(lambda_min > 0.0) || !std::isfinite(1.0 / lambda_min)) {
    throw NumericalError("scale_problem: S is degenerate");
  }
  const double beta = 1.0 / lambda_min;
  return {Problem(beta * problem.s(), beta * problem.alpha(), problem.gamma(), problem.pattern()), beta};
}

PrimalDual unscale_solution(const BlockVariable& x_scaled, const BlockVariable& z_scaled, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("unscale_solution: beta must be positive");
  return {{beta * x_scaled.x1, x_scaled.x2, x_scaled.x4 / beta},
          {z_scaled.x1 / beta, z_scaled.x2, beta * z_scaled.x4}};
}

PrimalDual scale_solution(const BlockVariable& x, const BlockVariable& z, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("scale_solution: beta must be positive");
  return {{x.x1 / beta, x.x2, beta * x.x4}, {beta * z.x1, z.x2, z.x4 / beta}};
}

double primal_objective(const Problem& problem, const BlockVariable& x) {
  Eigen::LLT<Matrix> llt(linalg::symmetrize(x.x1));
  if (llt.info() != Eigen::Success) return kInf;
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double trace = (problem.s().array() * x.x1.array()).sum();
  double penalty = 0.0;
  if (problem.gamma() > 0.0) {
    penalty = project_complement(x.x2, problem.pattern()).cwiseAbs().sum();
  }
  return -log_det + trace + 2.0 * problem.gamma() * penalty;
}

double dual_objective(const Problem& problem, const BlockVariable& z) {
  const Matrix slack = problem.s() - z.x1;
  Eigen::LLT<Matrix> llt(linalg::symmetrize(slack));
  if (llt.info() != Eigen::Success) return -kInf;
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return log_det - 2.0 * z.x2.trace() - problem.alpha() * z.x4.trace() + problem.dim();
}

BlockVariable project_dual_feasible(const Problem& problem, const BlockVariable& z, int max_sweeps) {
  const auto& pattern = problem.pattern();
  const double gamma = problem.gamma();
  const int n = problem.dim();
  auto clip_box = [&](BlockVariable v) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (!pattern.contains(i, j)) v.x2(i, j) = std::clamp(v.x2(i, j), -gamma, gamma);
    return v;
  };

  BlockVariable x = z;
  BlockVariable p = BlockVariable::zero(n);
  BlockVariable q = BlockVariable::zero(n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const BlockVariable y = prox_psd(x + p);
    p = x + p - y;
    BlockVariable next = clip_box(y + q);
    q = y + q - next;
    const double moved = (next - x).norm();
    x = std::move(next);
    if (moved <= 1e-13 * std::max(1.0, x.norm())) break;
  }
  return x;
}

KktDiagnostics kkt_check(const Problem& problem, const BlockVariable& x, const BlockVariable& z) {
  const int n = problem.dim();
  if (x.dim() != n || z.dim() != n) throw std::invalid_argument("kkt_check: dimension mismatch");
  const double alpha = problem.alpha();
  const Matrix eye = Matrix::Identity(n, n);
  KktDiagnostics d;

  {
    Eigen::LLT<Matrix> llt(linalg::symmetrize(problem.s() - z.x1));
    if (llt.info() != Eigen::Success) {
      d.stationarity = kInf;
    } else {
      const Matrix target = llt.solve(eye);
      d.stationarity = (x.x1 - target).norm() / std::max(1.0, x.x1.norm());
    }
  }

  {
    const auto eig4 = linalg::eigen_sym(x.x4);
    const double box = std::max({0.0, -eig4.values(0), eig4.values(n - 1) - alpha});
    const double pattern_gap = linalg::max_abs(project_pattern(x.x2, problem.pattern()) - eye);
    d.primal_feas = std::max({psd_violation(x.assemble()), box, pattern_gap});
  }

  {
    const double off = linalg::max_abs(project_complement(z.x2, problem.pattern()));
    d.dual_feas = std::max(std::max(0.0, off - problem.gamma()), psd_violation(z.assemble()));
  }

  {
    const Matrix zm = z.assemble();
    const Matrix xm = x.assemble();
    const double zx = (zm * xm).norm() / std::max(1.0, zm.norm() * xm.norm());
    const Matrix x4_gap = x.x4 - alpha * eye;
    const double box = (z.x4 * x4_gap).norm() / std::max(1.0, z.x4.norm() * x4_gap.norm());
    d.comp_slack = std::max(zx, box);
  }
  return d;
}

}  // namespace sempath
