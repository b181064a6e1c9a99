#include "sempath/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>

#include "sempath/error.hpp"
#include "sempath/parallel.hpp"

namespace sempath {

namespace {

constexpr int kMaxDraws = 1000;
constexpr double kMaxSpectralRadius = 0.95;

double spectral_radius(const Matrix& a) {
  Eigen::EigenSolver<Matrix> es(a, false);
  if (es.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  return m;
}

}  // namespace

void TrialSpec::validate() const {
  if (n < 1) throw std::invalid_argument("TrialSpec: n must be positive");
  if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("TrialSpec: density must lie in [0, 1]");
  if (n_samples < 2) throw std::invalid_argument("TrialSpec: need at least 2 samples");
  if (!(noise_var > 0.0)) throw std::invalid_argument("TrialSpec: noise_var must be positive");
  if (!(assumed_zero_frac >= 0.0 && assumed_zero_frac <= 1.0)) {
    throw std::invalid_argument("TrialSpec: assumed_zero_frac must lie in [0, 1]");
  }
}

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return Rng(seq);
}

PathModel generate_model(const TrialSpec& spec, Rng& rng) {
  spec.validate();
  const int n = spec.n;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const auto edges = static_cast<std::size_t>(std::lround(spec.density * static_cast<double>(pairs.size())));

  std::uniform_real_distribution<double> magnitude(0.3, 0.9);
  std::bernoulli_distribution coin(0.5);
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    std::shuffle(pairs.begin(), pairs.end(), rng);
    Matrix a = Matrix::Zero(n, n);
    for (std::size_t e = 0; e < edges; ++e) {
      auto [i, j] = pairs[e];
      if (coin(rng)) std::swap(i, j);
      const double v = magnitude(rng);
      a(i, j) = coin(rng) ? v : -v;
    }
    if (spectral_radius(a) < kMaxSpectralRadius) {
      std::vector<ZeroPattern::Index> zeros;
      for (std::size_t e = edges; e < pairs.size(); ++e) {
        zeros.push_back(pairs[e]);
        zeros.emplace_back(pairs[e].second, pairs[e].first);
      }
      for (std::size_t e = 0; e < edges; ++e) {
        const auto [i, j] = pairs[e];
        zeros.push_back(a(i, j) == 0.0 ? ZeroPattern::Index{i, j} : ZeroPattern::Index{j, i});
      }
      ZeroPattern truth(n, zeros);
      return PathModel(std::move(a), spec.noise_var * Matrix::Identity(n, n), std::move(truth));
    }
  }
  throw NumericalError("generate_model: no stable path matrix after 1000 draws; lower the density");
}

PathModel generate_model(const TrialSpec& spec) {
  Rng rng = trial_rng(spec.seed, 0);
  return generate_model(spec, rng);
}

Matrix generate_samples(const PathModel& model, long n_samples, Rng& rng) {
  if (n_samples < 1) throw std::invalid_argument("generate_samples: need at least one sample");
  const int n = model.dim();
  const auto eig = linalg::eigen_sym(model.psi());
  const Matrix psi_half =
      eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal() * eig.vectors.transpose();
  std::normal_distribution<double> normal;
  Matrix e(n, n_samples);
  for (long k = 0; k < n_samples; ++k)
    for (int i = 0; i < n; ++i) e(i, k) = normal(rng);
  const Matrix i_minus_a = Matrix::Identity(n, n) - model.a();
  return i_minus_a.partialPivLu().solve(psi_half * e).transpose();
}

Matrix generate_samples(const PathModel& model, long n_samples, std::uint64_t seed) {
  Rng rng = trial_rng(seed, 0);
  return generate_samples(model, n_samples, rng);
}

ZeroPattern reveal_zeros(const Matrix& a_true, double frac, Rng& rng) {
  linalg::require_square(a_true, "A");
  if (!(frac >= 0.0 && frac <= 1.0)) throw std::invalid_argument("reveal_zeros: fraction must lie in [0, 1]");
  const int n = static_cast<int>(a_true.rows());
  std::vector<ZeroPattern::Index> zeros;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && a_true(i, j) == 0.0) zeros.emplace_back(i, j);
  std::shuffle(zeros.begin(), zeros.end(), rng);
  zeros.resize(static_cast<std::size_t>(std::lround(frac * static_cast<double>(zeros.size()))));
  return ZeroPattern(n, zeros);
}

double ConfusionCounts::tp_rate() const {
  return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double ConfusionCounts::fp_rate() const {
  return fp + tn == 0 ? 0.0 : static_cast<double>(fp) / static_cast<double>(fp + tn);
}

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& o) {
  tp += o.tp;
  tn += o.tn;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

ConfusionCounts confusion(const Matrix& a_hat, const Matrix& a_true, const ZeroPattern& prior, double eps_zero) {
  linalg::require_square(a_hat, "A_hat");
  if (a_hat.rows() != a_true.rows() || a_true.cols() != a_true.rows() || prior.dim() != a_hat.rows()) {
    throw std::invalid_argument("confusion: dimension mismatch");
  }
  ConfusionCounts c;
  const int n = prior.dim();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || prior.contains(i, j)) continue;
      const bool predicted = std::abs(a_hat(i, j)) > eps_zero;
      const bool actual = a_true(i, j) != 0.0;
      if (predicted && actual) ++c.tp;
      else if (predicted) ++c.fp;
      else if (actual) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

Trial make_trial(const TrialSpec& spec, std::uint64_t trial) {
  spec.validate();
  Rng rng = trial_rng(spec.seed, trial);
  PathModel truth = generate_model(spec, rng);
  Matrix samples = generate_samples(truth, spec.n_samples, rng);
  Matrix s = sample_covariance(samples);
  ZeroPattern prior = reveal_zeros(truth.a(), spec.assumed_zero_frac, rng);
  return {std::move(truth), std::move(samples), std::move(s), std::move(prior)};
}

std::vector<RocPoint> roc_sweep(const TrialSpec& spec, const std::vector<double>& gamma_fractions,
                                const SolverOptions& opts, std::uint64_t trial) {
  const Trial t = make_trial(spec, trial);
  const double alpha = linalg::min_eigenvalue(t.s);
  const double gmax = gamma_max(t.s, alpha, t.prior);
  std::vector<RocPoint> points;
  points.reserve(gamma_fractions.size());
  for (double f : gamma_fractions) {
    if (!(f >= 0.0)) throw std::invalid_argument("roc_sweep: gamma fractions must be nonnegative");
    const FitResult fit = fit_sparse(t.s, alpha, f * gmax, t.prior, opts);
    RocPoint p;
    p.gamma = f * gmax;
    p.counts = confusion(fit.model.a(), t.truth.a(), t.prior, zero_threshold(fit.model.a()));
    p.fp_rate = p.counts.fp_rate();
    p.tp_rate = p.counts.tp_rate();
    p.converged = fit.report.converged;
    points.push_back(p);
  }
  return points;
}

std::vector<RocPoint> average_roc(const TrialSpec& spec, int trials, const std::vector<double>& gamma_fractions,
                                  const SolverOptions& opts, int jobs) {
  if (trials < 1) throw std::invalid_argument("average_roc: need at least one trial");
  std::vector<std::vector<RocPoint>> runs(static_cast<std::size_t>(trials));
  parallel_for(runs.size(), jobs, [&](std::size_t k) { runs[k] = roc_sweep(spec, gamma_fractions, opts, k); });

  std::vector<RocPoint> mean(gamma_fractions.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    mean[i].converged = true;
    for (const auto& run : runs) {
      mean[i].gamma += run[i].gamma / trials;
      mean[i].fp_rate += run[i].fp_rate / trials;
      mean[i].tp_rate += run[i].tp_rate / trials;
      mean[i].counts += run[i].counts;
      mean[i].converged = mean[i].converged && run[i].converged;
    }
  }
  return mean;
}

double partial_corr_pvalue(double r, long n_samples, int n) {
  const double df = static_cast<double>(n_samples - n);
  if (!(df > 0.0)) throw std::invalid_argument("partial_corr_pvalue: need N > n");
  if (std::abs(r) >= 1.0) return 0.0;
  const double t = r * std::sqrt(df / (1.0 - r * r));
  const boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

ZeroPattern partial_corr_screen(const Matrix& s, long n_samples, double significance) {
  linalg::require_square(s, "S");
  const int n = static_cast<int>(s.rows());
  if (n_samples <= n + 2) throw std::invalid_argument("partial_corr_screen: need N > n + 2");
  if (!(significance >= 0.0 && significance <= 1.0)) {
    throw std::invalid_argument("partial_corr_screen: significance must lie in [0, 1]");
  }
  const Matrix theta = linalg::inverse_spd(s);
  std::vector<ZeroPattern::Index> insignificant;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double r = -theta(i, j) / std::sqrt(theta(i, i) * theta(j, j));
      if (partial_corr_pvalue(r, n_samples, n) > significance) {
        insignificant.emplace_back(i, j);
        insignificant.emplace_back(j, i);
      }
    }
  }
  return ZeroPattern(n, insignificant);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.spec.validate();
  if (config.trials < 1) throw std::invalid_argument("run_experiment: need at least one trial");
  ExperimentResult result;
  result.config = config;
  result.trials.resize(static_cast<std::size_t>(config.trials));

  ExploreOptions inner = config.explore;
  inner.jobs = 1;
  parallel_for(result.trials.size(), config.jobs, [&](std::size_t k) {
    const Trial t = make_trial(config.spec, k);
    const SelectionPath path = explore(t.s, config.spec.n_samples, t.prior, inner);
    TrialOutcome out;
    out.trial = k;
    out.gamma_max = path.gamma_max;
    for (const Candidate& c : path.candidates) {
      CandidateOutcome co;
      co.gamma = c.gamma;
      co.scores = c.scores;
      co.converged = c.converged;
      if (c.refit) {
        const Matrix& a = c.refit->model.a();
        co.counts = confusion(a, t.truth.a(), t.prior, zero_threshold(a));
      }
      out.candidates.push_back(co);
    }
    out.selected = path.best;
    result.trials[k] = std::move(out);
  });

  for (Criterion c : kAllCriteria) {
    const auto ci = static_cast<std::size_t>(c);
    CriterionSummary& s = result.summary[ci];
    std::vector<double> gammas;
    for (const TrialOutcome& t : result.trials) {
      if (!t.selected[ci]) continue;
      const CandidateOutcome& chosen = t.candidates[*t.selected[ci]];
      s.tp += static_cast<double>(chosen.counts.tp);
      s.tn += static_cast<double>(chosen.counts.tn);
      s.fp += static_cast<double>(chosen.counts.fp);
      s.fn += static_cast<double>(chosen.counts.fn);
      gammas.push_back(chosen.gamma);
      ++s.trials;
    }
    if (s.trials > 0) {
      const double m = s.trials;
      s.tp /= m;
      s.tn /= m;
      s.fp /= m;
      s.fn /= m;
      s.gamma = std::accumulate(gammas.begin(), gammas.end(), 0.0) / m;
      s.gamma_median = median(gammas);
    }
    s.errors = s.fp + s.fn;
  }
  return result;
}

}  // namespace sempath
