#include "sempath/selection.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

#include "sempath/error.hpp"
#include "sempath/parallel.hpp"

namespace sempath {

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::aic: return "aic";
    case Criterion::aicc: return "aicc";
    case Criterion::bic: return "bic";
    case Criterion::kic: return "kic";
    case Criterion::kicc: return "kicc";
  }
  return "?";
}

Criterion parse_criterion(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  for (Criterion c : kAllCriteria)
    if (lower == to_string(c)) return c;
  throw std::invalid_argument("unknown criterion '" + std::string(name) + "' (expected aic, aicc, bic, kic, kicc)");
}

double log_likelihood(const Matrix& s, const Matrix& sigma_hat, long n_samples) {
  if (n_samples < 1) throw std::invalid_argument("log_likelihood: N must be at least 1");
  if (s.rows() != sigma_hat.rows() || s.cols() != sigma_hat.cols()) {
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  }
  Eigen::LLT<Matrix> llt(linalg::symmetrize(sigma_hat));
  if (llt.info() != Eigen::Success) throw NumericalError("log_likelihood: Sigma_hat is not positive definite");
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double trace = llt.solve(s).trace();
  return 0.5 * static_cast<double>(n_samples) * (-log_det - trace);
}

std::optional<double> score(double loglik, long k, long n_samples, Criterion c) {
  if (k < 0 || n_samples < 1) throw std::invalid_argument("score: need k >= 0 and N >= 1");
  const double dev = -2.0 * loglik;
  const double kd = static_cast<double>(k);
  const double nd = static_cast<double>(n_samples);
  switch (c) {
    case Criterion::aic: return dev + 2.0 * kd;
    case Criterion::bic: return dev + kd * std::log(nd);
    case Criterion::kic: return dev + 3.0 * kd;
    case Criterion::aicc:
      if (n_samples - k - 1 <= 0) return std::nullopt;
      return dev + 2.0 * kd + 2.0 * kd * (kd + 1.0) / (nd - kd - 1.0);
    case Criterion::kicc:
      if (n_samples - k - 2 <= 0) return std::nullopt;
      return dev + (kd + 1.0) * (3.0 * nd - kd - 2.0) / (nd - kd - 2.0) + kd / (nd - kd);
  }
  return std::nullopt;
}

std::vector<double> gamma_grid(double gmax, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("gamma_grid: grid_size must be at least 2");
  if (!(gmax >= 0.0) || !std::isfinite(gmax)) throw std::invalid_argument("gamma_grid: bad gamma_max");
  std::vector<double> grid{0.0};
  if (gmax == 0.0) return grid;
  const int m = grid_size - 1;
  const double lo = std::log10(gmax * 1e-4);
  const double hi = std::log10(gmax);
  for (int i = 0; i < m; ++i) {
    const double t = m == 1 ? 1.0 : static_cast<double>(i) / (m - 1);
    grid.push_back(i == m - 1 ? gmax : std::pow(10.0, lo + t * (hi - lo)));
  }
  return grid;
}

void select_best(SelectionPath& path) {
  for (Criterion c : kAllCriteria) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < path.candidates.size(); ++i) {
      const auto v = path.candidates[i].score_of(c);
      if (!v || !std::isfinite(*v)) continue;
      if (!best || *v < *path.candidates[*best].score_of(c)) best = i;
    }
    path.best[static_cast<std::size_t>(c)] = best;
  }
}

namespace {

Candidate evaluate(const Matrix& s, long n_samples, double alpha, double gamma, const ZeroPattern& prior,
                   const ExploreOptions& opts) {
  Candidate cand;
  cand.gamma = gamma;
  cand.pattern_hat = prior;
  try {
    const FitResult sparse = fit_sparse(s, alpha, gamma, prior, opts.solver);
    cand.pattern_hat = extract_pattern(sparse.model.a(), prior);
    cand.nnz = count_nonzeros(sparse.model.a());

    FitResult refit = fit_confirmatory(s, alpha, cand.pattern_hat, opts.solver);
    cand.converged = sparse.report.converged && refit.report.converged;
    cand.loglik = log_likelihood(s, refit.sigma_hat(), n_samples);

    const long n = s.rows();
    cand.k_eff = static_cast<long>(cand.pattern_hat.free_count()) + (opts.psi_diagonal ? n : n * (n + 1) / 2);
    for (Criterion c : kAllCriteria) {
      cand.scores[static_cast<std::size_t>(c)] = score(cand.loglik, cand.k_eff, n_samples, c);
    }
    cand.refit = std::move(refit);
  } catch (const std::exception& e) {
    cand.error = e.what();
    cand.scores.fill(std::nullopt);
    spdlog::warn("candidate gamma={} failed: {}", gamma, e.what());
  }
  return cand;
}

}  // namespace

SelectionPath explore(const Matrix& s, long n_samples, const ZeroPattern& prior, const std::vector<double>& gammas,
                      const ExploreOptions& opts) {
  linalg::require_square(s, "S");
  if (prior.dim() != s.rows()) throw std::invalid_argument("explore: prior pattern dimension mismatch");
  if (n_samples < 1) throw std::invalid_argument("explore: N must be at least 1");
  if (gammas.empty()) throw std::invalid_argument("explore: empty gamma grid");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] >= 0.0)) throw std::invalid_argument("explore: gamma values must be nonnegative");
    if (i > 0 && !(gammas[i] > gammas[i - 1])) throw std::invalid_argument("explore: gamma grid must increase");
  }
  opts.solver.validate();

  SelectionPath path;
  path.alpha = opts.alpha.value_or(linalg::min_eigenvalue(s));
  if (!(path.alpha > 0.0)) throw std::invalid_argument("explore: alpha must be positive");
  path.gamma_max = gamma_max(s, path.alpha, prior);
  path.n_samples = n_samples;
  path.prior = prior;
  path.candidates.resize(gammas.size());

  parallel_for(gammas.size(), opts.jobs, [&](std::size_t i) {
    path.candidates[i] = evaluate(s, n_samples, path.alpha, gammas[i], prior, opts);
  });
  select_best(path);
  return path;
}

SelectionPath explore(const Matrix& s, long n_samples, const ZeroPattern& prior, const ExploreOptions& opts) {
  const double alpha = opts.alpha.value_or(linalg::min_eigenvalue(s));
  if (!(alpha > 0.0)) throw std::invalid_argument("explore: alpha must be positive");
  return explore(s, n_samples, prior, gamma_grid(gamma_max(s, alpha, prior), opts.grid_size), opts);
}

}  // namespace sempath
