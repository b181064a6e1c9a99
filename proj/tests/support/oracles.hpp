#pragma once

// Independent reference computations for the tests: generic minimizers and
// brute-force versions of the proximal maps that never call the library's
// closed forms.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "sempath/model.hpp"

namespace sempath::testing {

using Rng = std::mt19937_64;

/// W W^T / n + floor I with W standard normal.
Matrix random_spd(int n, Rng& rng, double floor = 0.05);
/// Diagonal plus each off-diagonal entry with probability `frac`.
ZeroPattern random_pattern(int n, double frac, Rng& rng);
/// Symmetric with standard normal entries.
Matrix random_symmetric(int n, Rng& rng);
Matrix random_matrix(int rows, int cols, Rng& rng);
BlockVariable random_block(int n, Rng& rng, double scale = 1.0);

struct MinimizeResult {
  std::vector<double> x;
  double value;
};

/// Nelder-Mead with restarts around the incumbent until a restart stops
/// improving by more than `ftol`.
MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                           double step = 0.5, double ftol = 1e-15, int max_evals = 200000);

/// Golden-section search for a unimodal f on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

/// argmin_Z -log det Z1 + tr(S Z1) + (rho/2) ||Y - Z||_F^2 over 0 <= Z4 <= alpha I,
/// for n <= 2, by direct search.
BlockVariable oracle_prox_logdet_box(const BlockVariable& y, double rho, const Matrix& s, double alpha);
/// Entrywise argmin of 2 gamma |z| + rho (y - z)^2 off the pattern.
BlockVariable oracle_prox_l1_pattern(const BlockVariable& y, double rho, double gamma, const ZeroPattern& pattern);
/// argmin over Z = L L^T of ||Y - Z||_F^2 on the assembled matrix, n <= 2.
BlockVariable oracle_prox_psd(const BlockVariable& y);

/// Smallest constraint violation found by randomized local search over the
/// feasibility system X1 = S^{-1}, X1 >= (I - A)^T X4^{-1} (I - A),
/// 0 < X4 <= alpha I with A zero on `pattern`. Violation is
/// max(0, -lambda_min(S^{-1} - (I - A)^T X4^{-1} (I - A))).
double eq_feasibility_search(const Matrix& s, double alpha, const ZeroPattern& pattern, Rng& rng,
                             int starts = 200);

}  // namespace sempath::testing
