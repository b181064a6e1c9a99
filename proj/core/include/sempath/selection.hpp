#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sempath/estimator.hpp"

namespace sempath {

enum class Criterion { aic, aicc, bic, kic, kicc };

inline constexpr std::array<Criterion, 5> kAllCriteria{Criterion::aic, Criterion::aicc, Criterion::bic,
                                                       Criterion::kic, Criterion::kicc};

std::string_view to_string(Criterion c);
/// Case-insensitive; throws std::invalid_argument.
Criterion parse_criterion(std::string_view name);

/// (N/2)(-log det Sigma_hat - tr(S Sigma_hat^{-1})). Throws NumericalError if
/// Sigma_hat is not positive definite.
double log_likelihood(const Matrix& s, const Matrix& sigma_hat, long n_samples);

/// Information criterion of a model with log-likelihood L and k parameters:
///   AIC  = -2L + 2k
///   AICc = AIC + 2k(k+1)/(N-k-1)
///   BIC  = -2L + k ln N
///   KIC  = -2L + 3k
///   KICc = -2L + (k+1)(3N-k-2)/(N-k-2) + k/(N-k)
/// Corrected scores are empty when a denominator is not positive.
std::optional<double> score(double loglik, long k, long n_samples, Criterion c);

using ScoreSet = std::array<std::optional<double>, kAllCriteria.size()>;

struct Candidate {
  double gamma = 0.0;
  ZeroPattern pattern_hat{1};
  /// Off-diagonal support size found by the penalized fit.
  int nnz = 0;
  std::optional<FitResult> refit;
  double loglik = 0.0;
  long k_eff = 0;
  ScoreSet scores{};
  bool converged = false;
  /// Set when the penalized fit or the refit threw.
  std::string error;

  std::optional<double> score_of(Criterion c) const { return scores[static_cast<std::size_t>(c)]; }
};

struct SelectionPath {
  std::vector<Candidate> candidates;  // increasing gamma
  /// Index of the minimizing candidate per criterion; empty when no candidate
  /// has a defined score.
  std::array<std::optional<std::size_t>, kAllCriteria.size()> best{};
  double gamma_max = 0.0;
  double alpha = 0.0;
  long n_samples = 0;
  ZeroPattern prior{1};

  std::optional<std::size_t> best_index(Criterion c) const { return best[static_cast<std::size_t>(c)]; }
};

struct ExploreOptions {
  int grid_size = 20;
  /// Empty means lambda_min(S).
  std::optional<double> alpha;
  /// Count n (diagonal) or n(n+1)/2 (full) parameters for Psi in k_eff.
  bool psi_diagonal = true;
  SolverOptions solver;
  /// Worker threads over grid points; 0 means hardware concurrency.
  int jobs = 0;
};

/// {0} followed by grid_size - 1 log-spaced points on [1e-4 gmax, gmax].
/// Collapses to {0} when gmax is 0.
std::vector<double> gamma_grid(double gmax, int grid_size);

/// Sweep, extract, refit, score. N is the sample count behind S.
SelectionPath explore(const Matrix& s, long n_samples, const ZeroPattern& prior, const ExploreOptions& opts);

/// Sweep over an explicit increasing grid of gamma values.
SelectionPath explore(const Matrix& s, long n_samples, const ZeroPattern& prior, const std::vector<double>& gammas,
                      const ExploreOptions& opts);

/// best[] recomputed from the stored scores.
void select_best(SelectionPath& path);

}  // namespace sempath
