#include "run.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "sempath/error.hpp"
#include "sempath/estimator.hpp"
#include "sempath/io.hpp"
#include "sempath/synth.hpp"

namespace sempath::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Input {
  Matrix s;
  long n_samples = 0;  // 0 when unknown
};

double parse_number(const std::string& text, const char* flag) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v)) throw InputError(std::string(flag) + ": not a number: '" + text + "'");
  return v;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_json(const RunConfig& cfg, const std::string& name, const std::string& kind, json body) {
  json doc = io::document(kind, std::move(body));
  if (cfg.timestamp) doc["timestamp"] = utc_timestamp();
  io::write_text(cfg.out / name, doc.dump(2) + "\n");
}

Input load_input(const RunConfig& cfg) {
  if (cfg.data.has_value() == cfg.cov.has_value()) throw InputError("give exactly one of --data or --cov");
  Input in;
  if (cfg.data) {
    const Matrix y = io::read_matrix_csv(*cfg.data);
    if (y.rows() < 2) throw InputError("--data needs at least two rows");
    in.s = sample_covariance(y, cfg.center);
    in.n_samples = y.rows();
  } else {
    in.s = io::read_matrix_csv(*cfg.cov);
    if (in.s.rows() != in.s.cols()) throw InputError("--cov must be square");
    if ((in.s - in.s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, in.s.cwiseAbs().maxCoeff())) {
      throw InputError("--cov is not symmetric");
    }
    in.s = linalg::symmetrize(in.s);
    in.n_samples = cfg.samples;
  }
  const long n = in.s.rows();
  if (cfg.ridge) {
    if (!(*cfg.ridge > 0.0)) throw InputError("--ridge must be positive");
    in.s.diagonal().array() += *cfg.ridge;
  }
  if (!linalg::is_positive_definite(in.s)) {
    std::string msg = "sample covariance is not positive definite";
    if (in.n_samples > 0 && in.n_samples <= n) {
      msg += " (N = " + std::to_string(in.n_samples) + " samples for n = " + std::to_string(n) + " variables)";
    }
    throw InputError(msg + "; add shrinkage with --ridge <delta>");
  }
  return in;
}

ZeroPattern load_pattern(const RunConfig& cfg, const Input& in) {
  const int n = static_cast<int>(in.s.rows());
  if (cfg.pattern.empty() || cfg.pattern == "none") return ZeroPattern(n);
  if (cfg.pattern == "full") return ZeroPattern::full(n);
  if (cfg.pattern == "screen") {
    if (in.n_samples <= n + 2) throw InputError("--pattern screen needs N > n + 2 samples (use --samples with --cov)");
    return partial_corr_screen(in.s, in.n_samples, cfg.screen_significance);
  }
  return io::read_pattern(cfg.pattern, n);
}

void write_fit(const RunConfig& cfg, const std::string& stem, const FitResult& fit) {
  if (cfg.format == Format::csv) {
    io::write_matrix_csv(cfg.out / (stem + "_A.csv"), fit.model.a());
    io::write_matrix_csv(cfg.out / (stem + "_Psi.csv"), fit.model.psi());
  } else {
    write_json(cfg, stem + ".json", stem, io::to_json(fit));
  }
}

int run_fit(const RunConfig& cfg) {
  const Input in = load_input(cfg);
  const ZeroPattern pattern = load_pattern(cfg, in);
  const FitResult fit = fit_confirmatory(in.s, cfg.alpha, pattern, cfg.solver);
  write_fit(cfg, "fit", fit);
  return fit.report.converged ? kExitOk : kExitNotConverged;
}

int run_sparse(const RunConfig& cfg) {
  const Input in = load_input(cfg);
  const ZeroPattern pattern = load_pattern(cfg, in);
  const double alpha = cfg.alpha.value_or(linalg::min_eigenvalue(in.s));
  double gamma = 0.0;
  if (cfg.gamma_auto_max) {
    gamma = gamma_max(in.s, alpha, pattern);
  } else if (cfg.gamma) {
    gamma = *cfg.gamma;
  } else {
    throw InputError("sparse needs --gamma <value|auto-max>");
  }
  const FitResult fit = fit_sparse(in.s, alpha, gamma, pattern, cfg.solver);
  write_fit(cfg, "sparse", fit);
  return fit.report.converged ? kExitOk : kExitNotConverged;
}

int run_explore(const RunConfig& cfg) {
  const Input in = load_input(cfg);
  if (in.n_samples < 1) throw InputError("explore needs the sample count: use --data or --cov with --samples");
  const ZeroPattern prior = load_pattern(cfg, in);
  ExploreOptions opts;
  opts.grid_size = cfg.grid_size;
  opts.alpha = cfg.alpha;
  opts.psi_diagonal = !cfg.psi_full;
  opts.solver = cfg.solver;
  opts.jobs = cfg.jobs;
  const SelectionPath path = explore(in.s, in.n_samples, prior, opts);

  json body = io::to_json(path);
  body["criterion"] = std::string(to_string(cfg.criterion));
  write_json(cfg, "selection.json", "selection", std::move(body));
  {
    std::ostringstream csv;
    io::write_selection_csv(csv, path);
    io::write_text(cfg.out / "candidates.csv", csv.str());
  }
  const auto best = path.best_index(cfg.criterion);
  if (!best || !path.candidates[*best].refit) {
    spdlog::error("no candidate has a defined {} score", to_string(cfg.criterion));
    return kExitNotConverged;
  }
  const Candidate& chosen = path.candidates[*best];
  json fit = io::to_json(*chosen.refit);
  fit["selected_gamma"] = chosen.gamma;
  fit["criterion"] = std::string(to_string(cfg.criterion));
  write_json(cfg, "best_fit.json", "best_fit", std::move(fit));
  if (cfg.format == Format::csv) io::write_matrix_csv(cfg.out / "best_A.csv", chosen.refit->model.a());
  return chosen.converged ? kExitOk : kExitNotConverged;
}

TrialSpec trial_spec(const RunConfig& cfg) {
  TrialSpec spec;
  spec.n = cfg.n;
  spec.density = cfg.density;
  spec.n_samples = cfg.samples > 0 ? cfg.samples : 1000;
  spec.noise_var = cfg.noise_var;
  spec.assumed_zero_frac = cfg.assumed_zeros;
  spec.seed = cfg.seed;
  spec.validate();
  return spec;
}

int run_bench(const RunConfig& cfg) {
  ExperimentConfig ec;
  ec.spec = trial_spec(cfg);
  ec.trials = cfg.trials;
  ec.explore.grid_size = cfg.grid_size;
  ec.explore.alpha = cfg.alpha;
  ec.explore.psi_diagonal = !cfg.psi_full;
  ec.explore.solver = cfg.solver;
  ec.jobs = cfg.jobs;
  const ExperimentResult result = run_experiment(ec);

  std::ostringstream csv;
  io::write_experiment_csv(csv, result);
  io::write_text(cfg.out / "experiment.csv", csv.str());
  write_json(cfg, "experiment.json", "experiment", io::to_json(result));

  long stalled = 0;
  for (const auto& t : result.trials)
    for (const auto& c : t.candidates)
      if (!c.converged) ++stalled;
  if (stalled > 0) spdlog::warn("{} candidate fits did not converge", stalled);
  return kExitOk;
}

int run_gen(const RunConfig& cfg) {
  const TrialSpec spec = trial_spec(cfg);
  const Trial trial = make_trial(spec, 0);
  io::write_matrix_csv(cfg.out / "data.csv", trial.samples);
  json body = io::to_json(trial.truth);
  body["prior"] = io::to_json(trial.prior);
  body["spec"] = {{"n", spec.n},
                  {"density", spec.density},
                  {"n_samples", spec.n_samples},
                  {"noise_var", spec.noise_var},
                  {"assumed_zero_frac", spec.assumed_zero_frac},
                  {"seed", spec.seed}};
  write_json(cfg, "model.json", "model", std::move(body));
  std::ostringstream prior;
  io::write_pattern(prior, trial.prior);
  io::write_text(cfg.out / "prior_pattern.txt", prior.str());
  return kExitOk;
}

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("SEM_PATH_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off
    if (level != spdlog::level::off || std::string_view(env) == "off") spdlog::set_level(level);
  }
}

void add_solver_flags(CLI::App* app, RunConfig& cfg, std::string& algorithm) {
  app->add_option("--algorithm", algorithm, "admm or ppxa")->check(CLI::IsMember({"admm", "ppxa"}, CLI::ignore_case));
  app->add_option("--tol", cfg.solver.tol, "Relative-change stopping threshold");
  app->add_option("--max-iter", cfg.solver.max_iter, "Iteration cap");
  app->add_option("--rho", cfg.solver.rho, "ADMM penalty (default: automatic)");
  app->add_flag("!--no-scale", cfg.solver.scale, "Solve the unscaled problem");
}

void add_input_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--data", cfg.data, "Samples CSV, rows are observations");
  app->add_option("--cov", cfg.cov, "Covariance CSV");
  app->add_option("--samples", cfg.samples, "Sample count behind --cov");
  app->add_flag("!--no-center", cfg.center, "Do not mean-center --data");
  app->add_option("--ridge", cfg.ridge, "Add delta I to the covariance");
  app->add_option("--pattern", cfg.pattern, "Zero-pattern file (1-based i,j lines), 'screen', 'full' or 'none'");
  app->add_option("--screen-significance", cfg.screen_significance, "Level of the partial-correlation screen");
}

void add_synth_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--n", cfg.n, "Number of variables");
  app->add_option("--density", cfg.density, "Fraction of variable pairs joined by an edge");
  app->add_option("--samples", cfg.samples, "Samples per trial");
  app->add_option("--noise-var", cfg.noise_var, "Noise variance");
  app->add_option("--assumed-zeros", cfg.assumed_zeros, "Fraction of true zeros revealed as prior");
}

}  // namespace

std::optional<int> parse_args(int argc, const char* const* argv, RunConfig& cfg) {
  CLI::App app{"Convex path analysis for structural equation models"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string alpha_text;
  std::string gamma_text;
  std::string criterion_text = "bic";
  std::string algorithm_text = "admm";
  std::string format_text = "json";

  auto common = [&](CLI::App* sub) {
    sub->add_option("--alpha", alpha_text, "Bound on Psi, or 'auto' for lambda_min(S)");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--jobs", cfg.jobs, "Worker threads (0 = all cores)");
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_option("--format", format_text, "json or csv")->check(CLI::IsMember({"json", "csv"}, CLI::ignore_case));
    sub->add_flag("!--no-timestamp", cfg.timestamp, "Omit the timestamp field from JSON output");
    add_solver_flags(sub, cfg, algorithm_text);
  };

  auto* fit = app.add_subcommand("fit", "Confirmatory fit under a zero pattern");
  add_input_flags(fit, cfg);
  common(fit);

  auto* sparse = app.add_subcommand("sparse", "l1-penalized fit");
  add_input_flags(sparse, cfg);
  common(sparse);
  sparse->add_option("--gamma", gamma_text, "Penalty, or 'auto-max' for gamma_max")->required();

  auto* exp = app.add_subcommand("explore", "Gamma sweep with refits and model selection");
  add_input_flags(exp, cfg);
  common(exp);
  exp->add_option("--grid-size", cfg.grid_size, "Grid points including 0");
  exp->add_option("--criterion", criterion_text, "aic, aicc, bic, kic or kicc");
  exp->add_flag("--psi-full", cfg.psi_full, "Count a full symmetric Psi in k");

  auto* bench = app.add_subcommand("bench", "Synthetic benchmark over repeated trials");
  add_synth_flags(bench, cfg);
  common(bench);
  bench->add_option("--trials", cfg.trials, "Number of trials");
  bench->add_option("--grid-size", cfg.grid_size, "Grid points including 0");
  bench->add_flag("--psi-full", cfg.psi_full, "Count a full symmetric Psi in k");

  auto* gen = app.add_subcommand("gen", "Generate a random path model and samples");
  add_synth_flags(gen, cfg);
  gen->add_option("--seed", cfg.seed, "RNG seed");
  gen->add_option("--out", cfg.out, "Output directory");
  gen->add_flag("!--no-timestamp", cfg.timestamp, "Omit the timestamp field from JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (fit->parsed()) cfg.command = Command::fit;
    else if (sparse->parsed()) cfg.command = Command::sparse;
    else if (exp->parsed()) cfg.command = Command::explore;
    else if (bench->parsed()) cfg.command = Command::bench;
    else cfg.command = Command::gen;

    if (!alpha_text.empty() && alpha_text != "auto") {
      cfg.alpha = parse_number(alpha_text, "--alpha");
      if (!(*cfg.alpha > 0.0)) throw InputError("--alpha must be positive");
    }
    if (gamma_text == "auto-max") {
      cfg.gamma_auto_max = true;
    } else if (!gamma_text.empty()) {
      cfg.gamma = parse_number(gamma_text, "--gamma");
    }
    cfg.criterion = parse_criterion(criterion_text);
    cfg.solver.algorithm = parse_algorithm(algorithm_text);
    cfg.format = format_text == "csv" || format_text == "CSV" ? Format::csv : Format::json;
    cfg.solver.validate();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return std::nullopt;
}

int run(const RunConfig& cfg) {
  try {
    fs::create_directories(cfg.out);
    switch (cfg.command) {
      case Command::fit: return run_fit(cfg);
      case Command::sparse: return run_sparse(cfg);
      case Command::explore: return run_explore(cfg);
      case Command::bench: return run_bench(cfg);
      case Command::gen: return run_gen(cfg);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return kExitInput;
}

int main_entry(int argc, const char* const* argv) {
  configure_logging();
  RunConfig cfg;
  if (auto code = parse_args(argc, argv, cfg)) return *code;
  return run(cfg);
}

}  // namespace sempath::cli
