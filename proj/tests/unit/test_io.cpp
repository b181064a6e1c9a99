#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "oracles.hpp"
#include "sempath/error.hpp"
#include "sempath/io.hpp"
#include "sempath/synth.hpp"

using namespace sempath;
using nlohmann::json;

TEST(MatrixCsv, ParsesAndRejects) {
  std::istringstream ok("1, 2.5,-3e-2\n\n4,5,6\r\n");
  const Matrix m = io::parse_matrix_csv(ok);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 3);
  EXPECT_EQ(m(0, 1), 2.5);
  EXPECT_EQ(m(0, 2), -0.03);
  EXPECT_EQ(m(1, 2), 6.0);

  std::istringstream ragged("1,2\n3\n");
  EXPECT_THROW(io::parse_matrix_csv(ragged), InputError);
  std::istringstream text("1,x\n");
  EXPECT_THROW(io::parse_matrix_csv(text), InputError);
  std::istringstream blank("1,\n");
  EXPECT_THROW(io::parse_matrix_csv(blank), InputError);
  std::istringstream inf("1,inf\n");
  EXPECT_THROW(io::parse_matrix_csv(inf), InputError);
  std::istringstream empty("\n\n");
  EXPECT_THROW(io::parse_matrix_csv(empty), InputError);
  EXPECT_THROW(io::read_matrix_csv("/nonexistent/file.csv"), InputError);
}

TEST(MatrixCsv, RoundTripIsExact) {
  sempath::testing::Rng rng(51);
  const Matrix m = sempath::testing::random_matrix(4, 3, rng) * 1e-3;
  std::stringstream buf;
  io::write_matrix_csv(buf, m);
  EXPECT_EQ(io::parse_matrix_csv(buf), m);
}

TEST(Pattern, ParseOneBasedWithComments) {
  std::istringstream in("# prior zeros\n1,2\n 3 , 1 # trailing\n\n2,2\n");
  const ZeroPattern p = io::parse_pattern(in, 3);
  EXPECT_TRUE(p.contains(0, 1));
  EXPECT_TRUE(p.contains(2, 0));
  EXPECT_EQ(p.size(), 5u);

  std::istringstream out_of_range("1,4\n");
  EXPECT_THROW(io::parse_pattern(out_of_range, 3), InputError);
  std::istringstream zero("0,1\n");
  EXPECT_THROW(io::parse_pattern(zero, 3), InputError);
  std::istringstream no_comma("1 2\n");
  EXPECT_THROW(io::parse_pattern(no_comma, 3), InputError);
}

TEST(Pattern, RoundTrip) {
  sempath::testing::Rng rng(52);
  const ZeroPattern p = sempath::testing::random_pattern(6, 0.4, rng);
  std::stringstream buf;
  io::write_pattern(buf, p);
  EXPECT_EQ(io::parse_pattern(buf, 6), p);
}

TEST(Json, MatrixRoundTripAndDocument) {
  sempath::testing::Rng rng(53);
  const Matrix m = sempath::testing::random_matrix(3, 2, rng);
  EXPECT_EQ(io::matrix_from_json(json::parse(io::to_json(m).dump())), m);
  EXPECT_THROW(io::matrix_from_json(json::parse("[[1,2],[3]]")), InputError);
  EXPECT_THROW(io::matrix_from_json(json::parse("{}")), InputError);

  const json doc = io::document("fit", {{"x", 1}});
  EXPECT_EQ(doc["spec_version"], io::kSpecVersion);
  EXPECT_EQ(doc["kind"], "fit");
  EXPECT_EQ(doc["x"], 1);
}

TEST(Json, SelectionPathLayout) {
  TrialSpec spec;
  spec.n = 5;
  spec.seed = 54;
  const Trial t = make_trial(spec, 0);
  ExploreOptions o;
  o.grid_size = 4;
  const SelectionPath path = explore(t.s, spec.n_samples, t.prior, o);
  const json j = io::to_json(path);
  ASSERT_EQ(j["gammas"].size(), 4u);
  ASSERT_EQ(j["candidates"].size(), 4u);
  for (Criterion c : kAllCriteria) {
    const auto idx = path.best_index(c);
    ASSERT_TRUE(idx.has_value());
    EXPECT_EQ(j["best"][std::string(to_string(c))].get<double>(), path.candidates[*idx].gamma);
  }
  const json& c0 = j["candidates"][0];
  EXPECT_EQ(c0["k"].get<long>(), path.candidates[0].k_eff);
  EXPECT_EQ(c0["scores"]["bic"].get<double>(), *path.candidates[0].score_of(Criterion::bic));

  std::ostringstream csv;
  io::write_selection_csv(csv, path);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "gamma,nnz,loglik,k,aic,aicc,bic,kic,kicc,converged");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(WriteText, FailsOnMissingDirectory) {
  EXPECT_THROW(io::write_text("/nonexistent/dir/file.txt", "x"), InputError);
}
