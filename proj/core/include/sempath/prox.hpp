#pragma once

#include "sempath/model.hpp"

namespace sempath {

/// Parameters shared by the three proximal maps: weight rho of the quadratic
/// term (rho/2)||Y - Z||_F^2, penalty gamma, bound alpha, covariance S, and
/// the zero pattern on the X2 block.
class ProxParams {
 public:
  ProxParams(double rho, double gamma, double alpha, Matrix s, ZeroPattern pattern);
  ProxParams(const Problem& problem, double rho);

  double rho() const noexcept { return rho_; }
  double gamma() const noexcept { return gamma_; }
  double alpha() const noexcept { return alpha_; }
  const Matrix& s() const noexcept { return s_; }
  const ZeroPattern& pattern() const noexcept { return pattern_; }

 private:
  double rho_;
  double gamma_;
  double alpha_;
  Matrix s_;
  ZeroPattern pattern_;
};

/// S_k(a): a - k above k, 0 on [-k, k], a + k below -k.
double soft_threshold(double a, double k);

/// Positive root z of rho z^2 - lambda z - 1 = 0.
double logdet_root(double lambda, double rho);

/// prox of -log det Z1 + tr(S Z1) + I{0 <= Z4 <= alpha I}.
///
/// Z1 solves rho Z1 - Z1^{-1} = rho Y1 - S through one eigendecomposition,
/// Z2 = Y2, and Z4 is sym(Y4) with its spectrum clipped to [0, alpha].
BlockVariable prox_logdet_box(const BlockVariable& y, const ProxParams& p);

/// prox of 2 gamma sum_{(i,j) not in pattern} |Z2_ij| + I{P(Z2) = I}.
/// Pattern entries of Z2 are set to the identity; the rest are soft
/// thresholded at gamma / rho. Z1 and Z4 pass through.
BlockVariable prox_l1_pattern(const BlockVariable& y, const ProxParams& p);

/// Projection of the assembled 2n x 2n matrix onto the PSD cone.
BlockVariable prox_psd(const BlockVariable& y);

}  // namespace sempath
