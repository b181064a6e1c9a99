#include "sempath/prox.hpp"

#include <cmath>
#include <stdexcept>

namespace sempath {

ProxParams::ProxParams(double rho, double gamma, double alpha, Matrix s, ZeroPattern pattern)
    : rho_(rho), gamma_(gamma), alpha_(alpha), s_(std::move(s)), pattern_(std::move(pattern)) {
  if (!(rho_ > 0.0) || !std::isfinite(rho_)) throw std::invalid_argument("ProxParams: rho must be positive");
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) throw std::invalid_argument("ProxParams: alpha must be positive");
  if (!(gamma_ >= 0.0) || !std::isfinite(gamma_)) throw std::invalid_argument("ProxParams: gamma must be nonnegative");
  if (s_.rows() != pattern_.dim() || s_.cols() != pattern_.dim()) {
    throw std::invalid_argument("ProxParams: S and pattern dimensions differ");
  }
}

ProxParams::ProxParams(const Problem& problem, double rho)
    : ProxParams(rho, problem.gamma(), problem.alpha(), problem.s(), problem.pattern()) {}

double soft_threshold(double a, double k) {
  if (a > k) return a - k;
  if (a < -k) return a + k;
  return 0.0;
}

double logdet_root(double lambda, double rho) {
  // For lambda < 0 the textbook form cancels; use z = 2 / (sqrt(l^2 + 4 rho) - l).
  const double disc = std::sqrt(lambda * lambda + 4.0 * rho);
  if (lambda >= 0.0) return (lambda + disc) / (2.0 * rho);
  return 2.0 / (disc - lambda);
}

BlockVariable prox_logdet_box(const BlockVariable& y, const ProxParams& p) {
  const double rho = p.rho();
  BlockVariable z;
  const auto eig1 = linalg::eigen_sym(rho * y.x1 - p.s());
  z.x1 = linalg::spectral_map(eig1, [rho](double lambda) { return logdet_root(lambda, rho); });
  z.x2 = y.x2;
  z.x4 = linalg::clip_spectrum(y.x4, 0.0, p.alpha());
  return z;
}

BlockVariable prox_l1_pattern(const BlockVariable& y, const ProxParams& p) {
  const auto& pattern = p.pattern();
  const int n = pattern.dim();
  const double k = p.gamma() / p.rho();
  BlockVariable z{y.x1, Matrix(n, n), y.x4};
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (pattern.contains(i, j)) {
        z.x2(i, j) = i == j ? 1.0 : 0.0;
      } else {
        z.x2(i, j) = soft_threshold(y.x2(i, j), k);
      }
    }
  }
  return z;
}

BlockVariable prox_psd(const BlockVariable& y) {
  const auto eig = linalg::eigen_sym(y.assemble());
  return BlockVariable::from_full(
      linalg::spectral_map(eig, [](double v) { return v > 0.0 ? v : 0.0; }));
}

}  // namespace sempath
