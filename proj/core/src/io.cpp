#include "sempath/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>

#include "sempath/error.hpp"

namespace sempath::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_cell(std::string_view cell, long line) {
  cell = trim(cell);
  if (cell.empty()) throw InputError("line " + std::to_string(line) + ": empty cell");
  // strtod handles inf/nan spellings and exponents uniformly
  const std::string owned(cell);
  char* end = nullptr;
  const double v = std::strtod(owned.c_str(), &end);
  if (end != owned.c_str() + owned.size()) {
    throw InputError("line " + std::to_string(line) + ": not a number: '" + owned + "'");
  }
  if (!std::isfinite(v)) throw InputError("line " + std::to_string(line) + ": non-finite value");
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

nlohmann::json optional_number(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

nlohmann::json scores_json(const ScoreSet& scores) {
  nlohmann::json j = nlohmann::json::object();
  for (Criterion c : kAllCriteria) j[std::string(to_string(c))] = optional_number(scores[static_cast<std::size_t>(c)]);
  return j;
}

void write_double(std::ostream& out, double v) {
  if (std::isfinite(v)) out << v;
}

}  // namespace

Matrix parse_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      row.push_back(parse_cell(view.substr(start, comma == std::string_view::npos ? view.npos : comma - start), line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(rows.front().size()) +
                       " columns, found " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("no data rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_matrix_csv(in);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
  auto out = open_output(path);
  write_matrix_csv(out, m);
}

ZeroPattern parse_pattern(std::istream& in, int n) {
  if (n < 1) throw std::invalid_argument("parse_pattern: n must be positive");
  std::vector<ZeroPattern::Index> pairs;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != view.npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto comma = view.find(',');
    if (comma == view.npos) throw InputError("pattern line " + std::to_string(line_no) + ": expected 'i,j'");
    auto parse_index = [&](std::string_view s) {
      s = trim(s);
      int v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw InputError("pattern line " + std::to_string(line_no) + ": bad index '" + std::string(s) + "'");
      }
      if (v < 1 || v > n) {
        throw InputError("pattern line " + std::to_string(line_no) + ": index " + std::to_string(v) +
                         " outside 1.." + std::to_string(n));
      }
      return v - 1;
    };
    const int i = parse_index(view.substr(0, comma));
    const int j = parse_index(view.substr(comma + 1));
    pairs.emplace_back(i, j);
  }
  return ZeroPattern(n, pairs);
}

ZeroPattern read_pattern(const std::filesystem::path& path, int n) {
  auto in = open_input(path);
  try {
    return parse_pattern(in, n);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_pattern(std::ostream& out, const ZeroPattern& pattern) {
  for (const auto& [i, j] : pattern.pairs())
    if (i != j) out << i + 1 << ',' << j + 1 << '\n';
}

nlohmann::json to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(finite_or_null(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) throw InputError("matrix JSON must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw InputError("ragged matrix JSON");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const auto& cell = row[static_cast<std::size_t>(k)];
      if (!cell.is_number()) throw InputError("non-numeric matrix JSON cell");
      m(i, k) = cell.get<double>();
    }
  }
  return m;
}

nlohmann::json to_json(const ZeroPattern& pattern) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [i, j] : pattern.pairs())
    if (i != j) pairs.push_back({i + 1, j + 1});
  return {{"n", pattern.dim()}, {"zeros", std::move(pairs)}};
}

nlohmann::json to_json(const KktDiagnostics& kkt) {
  return {{"stationarity", finite_or_null(kkt.stationarity)},
          {"primal_feas", finite_or_null(kkt.primal_feas)},
          {"dual_feas", finite_or_null(kkt.dual_feas)},
          {"comp_slack", finite_or_null(kkt.comp_slack)}};
}

nlohmann::json to_json(const SolveReport& report) {
  return {{"algorithm", std::string(to_string(report.algorithm))},
          {"objective", finite_or_null(report.objective)},
          {"iterations", report.iterations},
          {"converged", report.converged},
          {"final_change", report.residual_history.empty() ? nlohmann::json(nullptr)
                                                           : finite_or_null(report.residual_history.back())},
          {"kkt", to_json(report.kkt)},
          {"lowrank_gap", finite_or_null(report.lowrank_gap)}};
}

nlohmann::json to_json(const PathModel& model) {
  return {{"A", to_json(model.a())}, {"Psi", to_json(model.psi())}, {"pattern", to_json(model.pattern())}};
}

nlohmann::json to_json(const FitResult& fit) {
  nlohmann::json j = to_json(fit.model);
  j["gamma"] = fit.gamma;
  j["alpha"] = fit.alpha;
  j["objective"] = finite_or_null(fit.report.objective);
  j["iterations"] = fit.report.iterations;
  j["converged"] = fit.report.converged;
  j["kkt"] = to_json(fit.report.kkt);
  j["lowrank_gap"] = finite_or_null(fit.report.lowrank_gap);
  j["algorithm"] = std::string(to_string(fit.report.algorithm));
  j["nnz"] = count_nonzeros(fit.model.a());
  j["Sigma_inv_hat"] = to_json(fit.sigma_inv_hat);
  j["warnings"] = fit.warnings;
  return j;
}

nlohmann::json to_json(const SelectionPath& path) {
  nlohmann::json gammas = nlohmann::json::array();
  nlohmann::json candidates = nlohmann::json::array();
  for (const Candidate& c : path.candidates) {
    gammas.push_back(c.gamma);
    nlohmann::json cj = {{"gamma", c.gamma},
                         {"nnz", c.nnz},
                         {"loglik", c.error.empty() ? finite_or_null(c.loglik) : nlohmann::json(nullptr)},
                         {"k", c.k_eff},
                         {"scores", scores_json(c.scores)},
                         {"converged", c.converged},
                         {"pattern", to_json(c.pattern_hat)}};
    if (!c.error.empty()) cj["error"] = c.error;
    candidates.push_back(std::move(cj));
  }
  nlohmann::json best = nlohmann::json::object();
  for (Criterion c : kAllCriteria) {
    const auto idx = path.best_index(c);
    best[std::string(to_string(c))] = idx ? nlohmann::json(path.candidates[*idx].gamma) : nlohmann::json(nullptr);
  }
  return {{"gamma_max", path.gamma_max}, {"alpha", path.alpha},       {"n_samples", path.n_samples},
          {"prior", to_json(path.prior)},  {"gammas", std::move(gammas)}, {"candidates", std::move(candidates)},
          {"best", std::move(best)}};
}

nlohmann::json to_json(const ExperimentResult& result) {
  const auto& spec = result.config.spec;
  nlohmann::json summary = nlohmann::json::object();
  for (Criterion c : kAllCriteria) {
    const CriterionSummary& s = result.of(c);
    summary[std::string(to_string(c))] = {{"tp", s.tp},         {"tn", s.tn},
                                          {"fp", s.fp},         {"fn", s.fn},
                                          {"errors", s.errors}, {"gamma_mean", s.gamma},
                                          {"gamma_median", s.gamma_median}, {"trials", s.trials}};
  }
  // pointwise mean over trials by grid index
  nlohmann::json roc = nlohmann::json::array();
  std::size_t points = 0;
  for (const auto& t : result.trials) points = std::max(points, t.candidates.size());
  for (std::size_t i = 0; i < points; ++i) {
    double fpr = 0.0;
    double tpr = 0.0;
    double gamma_frac = 0.0;
    int count = 0;
    for (const auto& t : result.trials) {
      if (i >= t.candidates.size()) continue;
      fpr += t.candidates[i].counts.fp_rate();
      tpr += t.candidates[i].counts.tp_rate();
      gamma_frac += t.gamma_max > 0.0 ? t.candidates[i].gamma / t.gamma_max : 0.0;
      ++count;
    }
    roc.push_back({{"index", i}, {"gamma_fraction", gamma_frac / count}, {"fp_rate", fpr / count},
                   {"tp_rate", tpr / count}});
  }
  return {{"spec",
           {{"n", spec.n},
            {"density", spec.density},
            {"n_samples", spec.n_samples},
            {"noise_var", spec.noise_var},
            {"assumed_zero_frac", spec.assumed_zero_frac},
            {"seed", spec.seed}}},
          {"trials", result.config.trials},
          {"grid_size", result.config.explore.grid_size},
          {"algorithm", std::string(to_string(result.config.explore.solver.algorithm))},
          {"summary", std::move(summary)},
          {"roc", std::move(roc)}};
}

nlohmann::json document(const std::string& kind, nlohmann::json body) {
  nlohmann::json doc = {{"spec_version", kSpecVersion}, {"kind", kind}};
  doc.update(body);
  return doc;
}

void write_selection_csv(std::ostream& out, const SelectionPath& path) {
  out << std::setprecision(17) << "gamma,nnz,loglik,k";
  for (Criterion c : kAllCriteria) out << ',' << to_string(c);
  out << ",converged\n";
  for (const Candidate& c : path.candidates) {
    out << c.gamma << ',' << c.nnz << ',';
    if (c.error.empty()) write_double(out, c.loglik);
    out << ',' << c.k_eff;
    for (const auto& s : c.scores) {
      out << ',';
      if (s) write_double(out, *s);
    }
    out << ',' << (c.converged ? 1 : 0) << '\n';
  }
}

void write_experiment_csv(std::ostream& out, const ExperimentResult& result) {
  out << std::setprecision(17) << "trial,gamma,tp,tn,fp,fn";
  for (Criterion c : kAllCriteria) out << ',' << to_string(c);
  out << '\n';
  for (const TrialOutcome& t : result.trials) {
    for (const CandidateOutcome& c : t.candidates) {
      out << t.trial << ',' << c.gamma << ',' << c.counts.tp << ',' << c.counts.tn << ',' << c.counts.fp << ','
          << c.counts.fn;
      for (const auto& s : c.scores) {
        out << ',';
        if (s) write_double(out, *s);
      }
      out << '\n';
    }
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace sempath::io
