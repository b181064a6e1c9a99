#include <benchmark/benchmark.h>

#include <random>

#include "sempath/estimator.hpp"
#include "sempath/prox.hpp"
#include "sempath/solver.hpp"
#include "sempath/synth.hpp"

namespace {

sempath::Matrix sample_cov(int n, std::uint64_t seed) {
  sempath::TrialSpec spec;
  spec.n = n;
  spec.density = 2.0 / n;
  spec.seed = seed;
  return sempath::make_trial(spec, 0).s;
}

sempath::BlockVariable random_point(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  auto draw = [&] { return sempath::Matrix(sempath::Matrix::NullaryExpr(n, n, [&] { return g(rng); })); };
  sempath::Matrix a = draw(), b = draw();
  return {a + a.transpose(), draw(), b + b.transpose()};
}

void BM_prox_logdet_box(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  const sempath::Matrix s = sample_cov(n, 1);
  const sempath::BlockVariable y = random_point(n, rng);
  const sempath::ProxParams params(1.0, 0.1, 0.5, s, sempath::ZeroPattern(n));
  for (auto _ : state) benchmark::DoNotOptimize(sempath::prox_logdet_box(y, params));
}
BENCHMARK(BM_prox_logdet_box)->Arg(10)->Arg(50)->Arg(100);

void BM_prox_psd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  const sempath::BlockVariable y = random_point(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(sempath::prox_psd(y));
}
BENCHMARK(BM_prox_psd)->Arg(10)->Arg(50)->Arg(100);

void BM_solve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto algorithm = static_cast<sempath::Algorithm>(state.range(1));
  const sempath::Matrix s = sample_cov(n, 3);
  const sempath::ZeroPattern pattern(n);
  const double alpha = sempath::linalg::min_eigenvalue(s);
  const sempath::Problem problem(s, alpha, 0.1 * sempath::gamma_max(s, alpha, pattern), pattern);
  sempath::SolverOptions opts;
  opts.algorithm = algorithm;
  int iterations = 0;
  for (auto _ : state) {
    const auto r = sempath::solve(problem, opts);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.objective);
  }
  state.counters["iterations"] = iterations;
}
BENCHMARK(BM_solve)
    ->Args({10, static_cast<int>(sempath::Algorithm::admm)})
    ->Args({10, static_cast<int>(sempath::Algorithm::ppxa)})
    ->Args({30, static_cast<int>(sempath::Algorithm::admm)})
    ->Args({30, static_cast<int>(sempath::Algorithm::ppxa)})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
