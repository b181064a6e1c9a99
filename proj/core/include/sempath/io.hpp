#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "sempath/estimator.hpp"
#include "sempath/selection.hpp"
#include "sempath/synth.hpp"

namespace sempath::io {

inline constexpr const char* kSpecVersion = "1";

/// Plain comma-separated rows, no header. Blank lines are skipped. Throws
/// InputError on ragged rows or non-numeric cells.
Matrix parse_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// One "i,j" pair per line, 1-based; '#' starts a comment. The diagonal is
/// added automatically. Throws InputError on malformed lines or indices
/// outside [1, n].
ZeroPattern parse_pattern(std::istream& in, int n);
ZeroPattern read_pattern(const std::filesystem::path& path, int n);
/// Off-diagonal members only, 1-based, row-major.
void write_pattern(std::ostream& out, const ZeroPattern& pattern);

nlohmann::json to_json(const Matrix& m);
nlohmann::json to_json(const ZeroPattern& pattern);
nlohmann::json to_json(const KktDiagnostics& kkt);
nlohmann::json to_json(const SolveReport& report);
nlohmann::json to_json(const PathModel& model);
nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const SelectionPath& path);
nlohmann::json to_json(const ExperimentResult& result);

Matrix matrix_from_json(const nlohmann::json& j);

/// {"spec_version": "1", "kind": kind, ...body}.
nlohmann::json document(const std::string& kind, nlohmann::json body);

/// gamma,nnz,loglik,k,<criteria>,converged per candidate.
void write_selection_csv(std::ostream& out, const SelectionPath& path);
/// trial,gamma,tp,tn,fp,fn,<criteria> per trial and grid point.
void write_experiment_csv(std::ostream& out, const ExperimentResult& result);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace sempath::io
