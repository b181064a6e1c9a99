#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "run.hpp"
#include "sempath/estimator.hpp"
#include "sempath/io.hpp"
#include "sempath/synth.hpp"

using namespace sempath;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("sempath_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sempath");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::main_entry(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST(Cli, GenIsDeterministic) {
  TempDir a, b;
  ASSERT_EQ(run_cli({"gen", "--seed", "7", "--n", "6", "--samples", "200", "--out", a.path().string()}), 0);
  ASSERT_EQ(run_cli({"gen", "--seed", "7", "--n", "6", "--samples", "200", "--out", b.path().string()}), 0);
  EXPECT_EQ(slurp(a / "data.csv"), slurp(b / "data.csv"));
  EXPECT_EQ(slurp(a / "prior_pattern.txt"), slurp(b / "prior_pattern.txt"));
  json ma = load_json(a / "model.json");
  json mb = load_json(b / "model.json");
  ma.erase("timestamp");
  mb.erase("timestamp");
  EXPECT_EQ(ma, mb);
  EXPECT_EQ(ma["spec_version"], "1");
  EXPECT_EQ(io::read_matrix_csv(a / "data.csv").rows(), 200);
}

TEST(Cli, FitWithFullPatternEmitsZeroA) {
  TempDir d;
  ASSERT_EQ(run_cli({"gen", "--seed", "1", "--n", "5", "--out", d.path().string()}), 0);
  ASSERT_EQ(run_cli({"fit", "--data", d / "data.csv", "--pattern", "full", "--out", d.path().string()}), 0);
  const json fit = load_json(d / "fit.json");
  EXPECT_EQ(io::matrix_from_json(fit["A"]), Matrix::Zero(5, 5));
  EXPECT_TRUE(fit["converged"].get<bool>());
  for (const char* key : {"Psi", "objective", "iterations", "kkt", "lowrank_gap"}) EXPECT_TRUE(fit.contains(key)) << key;

  ASSERT_EQ(run_cli({"fit", "--data", d / "data.csv", "--format", "csv", "--out", d.path().string()}), 0);
  EXPECT_EQ(io::read_matrix_csv(d / "fit_A.csv").rows(), 5);
  EXPECT_EQ(io::read_matrix_csv(d / "fit_Psi.csv").rows(), 5);
}

TEST(Cli, SparseAutoMaxGivesZeroAAndReportsGammaMax) {
  TempDir d;
  ASSERT_EQ(run_cli({"gen", "--seed", "2", "--n", "5", "--out", d.path().string()}), 0);
  ASSERT_EQ(run_cli({"sparse", "--data", d / "data.csv", "--gamma", "auto-max", "--out", d.path().string()}), 0);
  const json fit = load_json(d / "sparse.json");
  EXPECT_LE(io::matrix_from_json(fit["A"]).cwiseAbs().maxCoeff(), 1e-6);
  const Matrix s = sample_covariance(io::read_matrix_csv(d / "data.csv"));
  EXPECT_DOUBLE_EQ(fit["gamma"].get<double>(), gamma_max(s, linalg::min_eigenvalue(s), ZeroPattern(5)));
}

TEST(Cli, EmittedPathMatrixRespectsPattern) {
  TempDir d;
  ASSERT_EQ(run_cli({"gen", "--seed", "3", "--n", "6", "--assumed-zeros", "0.5", "--out", d.path().string()}), 0);
  ASSERT_EQ(run_cli({"sparse", "--data", d / "data.csv", "--gamma", "0.01", "--pattern", d / "prior_pattern.txt",
                     "--out", d.path().string()}),
            0);
  const Matrix a = io::matrix_from_json(load_json(d / "sparse.json")["A"]);
  const ZeroPattern prior = io::read_pattern(d / "prior_pattern.txt", 6);
  for (const auto& [i, j] : prior.pairs()) EXPECT_EQ(a(i, j), 0.0);
}

TEST(Cli, ExploreIsReproducible) {
  TempDir d, a, b;
  ASSERT_EQ(run_cli({"gen", "--seed", "4", "--n", "6", "--out", d.path().string()}), 0);
  for (const TempDir* out : {&a, &b}) {
    ASSERT_EQ(run_cli({"explore", "--data", d / "data.csv", "--grid-size", "6", "--jobs", "2", "--out",
                       out->path().string()}),
              0);
  }
  for (const char* name : {"selection.json", "best_fit.json"}) {
    json ja = load_json(a.path() / name);
    json jb = load_json(b.path() / name);
    ASSERT_TRUE(ja.contains("timestamp"));
    ja.erase("timestamp");
    jb.erase("timestamp");
    EXPECT_EQ(ja.dump(), jb.dump()) << name;
  }
  EXPECT_EQ(slurp(a / "candidates.csv"), slurp(b / "candidates.csv"));
  EXPECT_EQ(load_json(a / "selection.json")["candidates"].size(), 6u);
}

TEST(Cli, InputErrorsExitOne) {
  TempDir d;
  EXPECT_EQ(run_cli({"fit", "--data", d / "missing.csv", "--out", d.path().string()}), cli::kExitInput);
  EXPECT_EQ(run_cli({"fit", "--out", d.path().string()}), cli::kExitInput);
  EXPECT_EQ(run_cli({"frobnicate"}), cli::kExitInput);
  EXPECT_EQ(run_cli({"fit", "--data", "x.csv", "--criterion", "bic"}), cli::kExitInput);
  EXPECT_EQ(run_cli({"explore", "--data", "x.csv", "--criterion", "hqic"}), cli::kExitInput);
  EXPECT_EQ(run_cli({"sparse", "--data", "x.csv", "--gamma", "abc"}), cli::kExitInput);

  io::write_text(d / "ragged.csv", "1,2\n3\n");
  EXPECT_EQ(run_cli({"fit", "--data", d / "ragged.csv", "--out", d.path().string()}), cli::kExitInput);

  ASSERT_EQ(run_cli({"gen", "--seed", "5", "--n", "4", "--out", d.path().string()}), 0);
  io::write_text(d / "bad_pattern.txt", "1,9\n");
  EXPECT_EQ(run_cli({"fit", "--data", d / "data.csv", "--pattern", d / "bad_pattern.txt", "--out",
                     d.path().string()}),
            cli::kExitInput);
}

TEST(Cli, SingularCovarianceNeedsRidge) {
  TempDir d;
  // 3 samples of 5 variables
  ASSERT_EQ(run_cli({"gen", "--seed", "6", "--n", "5", "--samples", "3", "--out", d.path().string()}), 0);
  testing::internal::CaptureStderr();
  const int code = run_cli({"fit", "--data", d / "data.csv", "--out", d.path().string()});
  const std::string err = testing::internal::GetCapturedStderr();
  EXPECT_EQ(code, cli::kExitInput);
  EXPECT_NE(err.find("--ridge"), std::string::npos) << err;
  EXPECT_NE(run_cli({"fit", "--data", d / "data.csv", "--ridge", "0.1", "--out", d.path().string()}),
            cli::kExitInput);
}

TEST(Cli, NonConvergenceExitsTwoAndStillWrites) {
  TempDir d;
  ASSERT_EQ(run_cli({"gen", "--seed", "8", "--n", "5", "--out", d.path().string()}), 0);
  EXPECT_EQ(run_cli({"fit", "--data", d / "data.csv", "--max-iter", "2", "--tol", "1e-12", "--out",
                     d.path().string()}),
            cli::kExitNotConverged);
  EXPECT_FALSE(load_json(d / "fit.json")["converged"].get<bool>());
}

TEST(Cli, BenchWritesArtifacts) {
  TempDir d;
  ASSERT_EQ(run_cli({"bench", "--n", "5", "--trials", "2", "--grid-size", "4", "--samples", "200", "--out",
                     d.path().string()}),
            0);
  const json j = load_json(d / "experiment.json");
  EXPECT_EQ(j["kind"], "experiment");
  EXPECT_EQ(j["roc"].size(), 4u);
  EXPECT_TRUE(j["summary"].contains("kicc"));
  EXPECT_FALSE(slurp(d / "experiment.csv").empty());
}

TEST(Cli, GenThenExploreRecoversMostTrueEdges) {
  // n = 10, N = 1000, sparse truth: tp_rate >= 0.5 for a majority of seeds
  int good = 0;
  const int seeds = 5;
  for (int seed = 0; seed < seeds; ++seed) {
    TempDir d;
    ASSERT_EQ(run_cli({"gen", "--seed", std::to_string(seed), "--out", d.path().string()}), 0);
    ASSERT_EQ(run_cli({"explore", "--data", d / "data.csv", "--out", d.path().string()}), 0);
    const Matrix truth = io::matrix_from_json(load_json(d / "model.json")["A"]);
    const Matrix est = io::matrix_from_json(load_json(d / "best_fit.json")["A"]);
    const ConfusionCounts c = confusion(est, truth, ZeroPattern(10), zero_threshold(est));
    if (c.tp_rate() >= 0.5) ++good;
  }
  EXPECT_GT(good, seeds / 2);
}
