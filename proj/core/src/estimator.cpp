#include "sempath/estimator.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "sempath/error.hpp"

namespace sempath {

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

FitResult fit(const Matrix& s, std::optional<double> alpha_opt, double gamma, const ZeroPattern& pattern,
              const SolverOptions& opts) {
  linalg::require_square(s, "S");
  if (pattern.dim() != s.rows()) throw std::invalid_argument("pattern dimension does not match S");
  const double alpha = alpha_opt.value_or(linalg::min_eigenvalue(s));
  std::vector<std::string> warnings;

  const double alpha_c = alpha_critical(s);
  if (alpha > alpha_c) {
    warnings.push_back("alpha " + format_double(alpha) + " exceeds alpha_c " + format_double(alpha_c) +
                       "; the relaxation may return the trivial solution");
  }

  const Problem problem(s, alpha, gamma, pattern);
  SolveReport report = solve(problem, opts);
  if (!report.converged) {
    warnings.push_back("solver stopped after " + std::to_string(report.iterations) +
                       " iterations without converging");
  }

  const int n = problem.dim();
  const Matrix eye = Matrix::Identity(n, n);
  Matrix a = eye - report.x.x2;
  a.diagonal().setZero();
  Matrix sigma_inv;
  if (std::isfinite(report.lowrank_gap) && report.lowrank_gap <= kLowRankTrust) {
    const Matrix& x2 = report.x.x2;
    sigma_inv = linalg::symmetrize(x2.transpose() * linalg::inverse_spd(report.x.x4) * x2);
  } else {
    warnings.push_back("low-rank gap " + format_double(report.lowrank_gap) +
                       " too large; using X1 as the inverse covariance estimate");
    sigma_inv = linalg::symmetrize(report.x.x1);
  }
  for (const auto& w : warnings) spdlog::warn("{}", w);

  PathModel model(std::move(a), linalg::symmetrize(report.x.x4), pattern);
  return {std::move(model), std::move(sigma_inv), std::move(report), gamma, alpha, std::move(warnings)};
}

}  // namespace

Matrix FitResult::sigma_hat() const { return linalg::inverse_spd(sigma_inv_hat); }

double gamma_max(const Matrix& s, double alpha, const ZeroPattern& pattern) {
  linalg::require_square(s, "S");
  if (!(alpha > 0.0)) throw std::invalid_argument("gamma_max: alpha must be positive");
  if (pattern.dim() != s.rows()) throw std::invalid_argument("gamma_max: pattern dimension mismatch");
  const int n = pattern.dim();
  const Matrix m = alpha * Matrix::Identity(n, n) - s;
  return linalg::max_abs(project_complement(m, pattern)) / alpha;
}

double alpha_critical(const Matrix& s) {
  linalg::require_square(s, "S");
  return static_cast<double>(s.rows()) / linalg::inverse_spd(s).trace();
}

FitResult fit_confirmatory(const Matrix& s, std::optional<double> alpha, const ZeroPattern& pattern,
                           const SolverOptions& opts) {
  return fit(s, alpha, 0.0, pattern, opts);
}

FitResult fit_sparse(const Matrix& s, std::optional<double> alpha, double gamma, const ZeroPattern& pattern,
                     const SolverOptions& opts) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("fit_sparse: gamma must be nonnegative");
  return fit(s, alpha, gamma, pattern, opts);
}

double zero_threshold(const Matrix& a) { return 1e-5 * std::max(1.0, linalg::max_abs(a)); }

ZeroPattern extract_pattern(const Matrix& a, const ZeroPattern& prior, std::optional<double> eps) {
  linalg::require_square(a, "A");
  if (prior.dim() != a.rows()) throw std::invalid_argument("extract_pattern: dimension mismatch");
  const double cut = eps.value_or(zero_threshold(a));
  std::vector<ZeroPattern::Index> zeros;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j && std::abs(a(i, j)) <= cut) zeros.emplace_back(i, j);
  return ZeroPattern(prior.dim(), zeros).united(prior);
}

int count_nonzeros(const Matrix& a, std::optional<double> eps) {
  const double cut = eps.value_or(zero_threshold(a));
  int count = 0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j && std::abs(a(i, j)) > cut) ++count;
  return count;
}

}  // namespace sempath
