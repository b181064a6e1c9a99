#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sempath/model.hpp"
#include "sempath/solver.hpp"

namespace sempath {

/// Gap below which X2^T X4^{-1} X2 is trusted as the inverse covariance.
inline constexpr double kLowRankTrust = 1e-3;

struct FitResult {
  PathModel model;        // A = I - X2, Psi = X4
  Matrix sigma_inv_hat;   // estimate of Sigma^{-1}
  SolveReport report;
  double gamma = 0.0;
  double alpha = 0.0;
  std::vector<std::string> warnings;

  /// Inverse of sigma_inv_hat.
  Matrix sigma_hat() const;
};

/// (1/alpha) max over entries outside `pattern` of |alpha I - S|.
double gamma_max(const Matrix& s, double alpha, const ZeroPattern& pattern);

/// n / tr(S^{-1}), the harmonic mean of the eigenvalues of S.
double alpha_critical(const Matrix& s);

/// Confirmatory fit (no penalty). alpha defaults to lambda_min(S); a value
/// above alpha_critical(S) only triggers a warning.
FitResult fit_confirmatory(const Matrix& s, std::optional<double> alpha, const ZeroPattern& pattern,
                           const SolverOptions& opts = {});

FitResult fit_sparse(const Matrix& s, std::optional<double> alpha, double gamma,
                     const ZeroPattern& pattern, const SolverOptions& opts = {});

/// 1e-5 * max(1, ||A||_max).
double zero_threshold(const Matrix& a);

/// Pattern of entries of A with |A_ij| <= eps (default zero_threshold(A)),
/// merged with `prior`.
ZeroPattern extract_pattern(const Matrix& a, const ZeroPattern& prior,
                            std::optional<double> eps = std::nullopt);

/// Off-diagonal entries of A above eps (default zero_threshold(A)).
int count_nonzeros(const Matrix& a, std::optional<double> eps = std::nullopt);

}  // namespace sempath
