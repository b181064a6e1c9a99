#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "sempath/selection.hpp"

namespace sempath {

struct TrialSpec {
  int n = 10;
  /// Fraction of the n(n-1)/2 variable pairs joined by an edge. Each edge
  /// gets one random direction, so A has round(density n(n-1)/2) nonzeros.
  double density = 0.2;
  long n_samples = 1000;
  double noise_var = 0.1;
  /// Fraction of the true zeros of A handed to the estimator as a prior.
  double assumed_zero_frac = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

using Rng = std::mt19937_64;

/// Stream for trial `trial` of a run seeded with `seed`; independent of how
/// trials are scheduled.
Rng trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Random stable path model: edge magnitudes uniform on [0.3, 0.9] with random
/// sign, redrawn until the spectral radius of A is below 0.95. Psi =
/// noise_var I and the pattern is the true zero set. Throws NumericalError
/// after 1000 rejected draws.
PathModel generate_model(const TrialSpec& spec, Rng& rng);
PathModel generate_model(const TrialSpec& spec);

/// N x n matrix of rows (I - A)^{-1} e with e ~ N(0, Psi).
Matrix generate_samples(const PathModel& model, long n_samples, Rng& rng);
Matrix generate_samples(const PathModel& model, long n_samples, std::uint64_t seed);

/// Diagonal plus round(frac * #zeros) off-diagonal zeros of A drawn at random.
ZeroPattern reveal_zeros(const Matrix& a_true, double frac, Rng& rng);

struct ConfusionCounts {
  long tp = 0;
  long tn = 0;
  long fp = 0;
  long fn = 0;

  long total() const { return tp + tn + fp + fn; }
  long errors() const { return fp + fn; }
  /// tp / (tp + fn); 0 when there are no positives.
  double tp_rate() const;
  /// fp / (fp + tn); 0 when there are no negatives.
  double fp_rate() const;

  ConfusionCounts& operator+=(const ConfusionCounts& o);
};

/// Counts over off-diagonal entries outside `prior`. |a_hat_ij| > eps is a
/// predicted edge, a_true_ij != 0 a true one.
ConfusionCounts confusion(const Matrix& a_hat, const Matrix& a_true, const ZeroPattern& prior, double eps_zero);

/// One generated problem: truth, data, covariance, revealed prior.
struct Trial {
  PathModel truth;
  Matrix samples;
  Matrix s;
  ZeroPattern prior;
};

Trial make_trial(const TrialSpec& spec, std::uint64_t trial);

struct RocPoint {
  double gamma = 0.0;
  ConfusionCounts counts;
  double fp_rate = 0.0;
  double tp_rate = 0.0;
  bool converged = false;
};

/// Penalized fits of trial 0 of `spec` at gamma = f * gamma_max for each f in
/// `gamma_fractions`, scored against the truth.
std::vector<RocPoint> roc_sweep(const TrialSpec& spec, const std::vector<double>& gamma_fractions,
                                const SolverOptions& opts, std::uint64_t trial = 0);

/// Pointwise mean over trials of the rates of roc_sweep.
std::vector<RocPoint> average_roc(const TrialSpec& spec, int trials, const std::vector<double>& gamma_fractions,
                                  const SolverOptions& opts, int jobs = 0);

/// Partial-correlation screen: pairs whose partial correlation given all
/// other variables is not significant at `significance` (two-sided t test,
/// N - n degrees of freedom) go into the returned pattern, both directions.
ZeroPattern partial_corr_screen(const Matrix& s, long n_samples, double significance);

/// Two-sided p-value of partial correlation r with N samples and n variables.
double partial_corr_pvalue(double r, long n_samples, int n);

struct ExperimentConfig {
  TrialSpec spec;
  int trials = 50;
  ExploreOptions explore;  // explore.jobs is ignored; trials run in parallel
  int jobs = 0;
};

struct CandidateOutcome {
  double gamma = 0.0;
  ConfusionCounts counts;
  ScoreSet scores{};
  bool converged = false;
};

struct TrialOutcome {
  std::uint64_t trial = 0;
  double gamma_max = 0.0;
  std::vector<CandidateOutcome> candidates;
  /// Per criterion: selected candidate index, if any.
  std::array<std::optional<std::size_t>, kAllCriteria.size()> selected{};
};

struct CriterionSummary {
  double tp = 0.0;
  double tn = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double errors = 0.0;
  double gamma = 0.0;         // mean selected gamma
  double gamma_median = 0.0;  // median selected gamma
  int trials = 0;             // trials with a selection
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialOutcome> trials;
  std::array<CriterionSummary, kAllCriteria.size()> summary{};

  const CriterionSummary& of(Criterion c) const { return summary[static_cast<std::size_t>(c)]; }
};

ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace sempath
