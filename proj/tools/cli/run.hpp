#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sempath/selection.hpp"
#include "sempath/solver.hpp"

namespace sempath::cli {

enum class Command { fit, sparse, explore, bench, gen };
enum class Format { json, csv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNotConverged = 2;

struct RunConfig {
  Command command = Command::fit;

  // input: exactly one of data (N x n samples) or cov (n x n)
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> cov;
  long samples = 0;  // N behind --cov; sample count for gen/bench
  bool center = true;
  std::optional<double> ridge;

  std::optional<double> alpha;  // empty: lambda_min(S)
  std::optional<double> gamma;
  bool gamma_auto_max = false;
  int grid_size = 20;
  std::string pattern;  // "", "screen", or a pattern file
  double screen_significance = 0.01;
  Criterion criterion = Criterion::bic;
  bool psi_full = false;
  SolverOptions solver;

  std::uint64_t seed = 0;
  int jobs = 0;
  std::filesystem::path out = ".";
  Format format = Format::json;
  bool timestamp = true;

  // gen / bench
  int n = 10;
  double density = 0.2;
  double noise_var = 0.1;
  double assumed_zeros = 0.0;
  int trials = 50;
};

/// Parses argv into a config. Returns the exit code to use when parsing ends
/// the run (help, usage error), otherwise empty.
std::optional<int> parse_args(int argc, const char* const* argv, RunConfig& config);

/// Executes one command and writes its artifacts under config.out. Returns
/// kExitOk, kExitNotConverged (artifacts still written) or kExitInput.
int run(const RunConfig& config);

/// parse_args + run with logging set up from SEM_PATH_LOG.
int main_entry(int argc, const char* const* argv);

}  // namespace sempath::cli
