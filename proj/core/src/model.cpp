#include "sempath/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sempath/error.hpp"

namespace sempath {

namespace {

void require_dim(const Matrix& m, int n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(n) + "x" +
                                std::to_string(n) + ", got " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()));
  }
}

bool is_symmetric(const Matrix& m) {
  const double scale = std::max(1.0, linalg::max_abs(m));
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale;
}

}  // namespace

// ---------------------------------------------------------------------------
// ZeroPattern

ZeroPattern::ZeroPattern(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("ZeroPattern: dimension must be positive");
  mask_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) insert(i, i);
}

ZeroPattern::ZeroPattern(int n, std::span<const Index> pairs) : ZeroPattern(n) {
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw std::out_of_range("ZeroPattern: index (" + std::to_string(i) + "," +
                              std::to_string(j) + ") outside dimension " + std::to_string(n));
    }
    insert(i, j);
  }
}

ZeroPattern ZeroPattern::full(int n) {
  ZeroPattern p(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p.insert(i, j);
  return p;
}

void ZeroPattern::insert(int i, int j) {
  auto& slot = mask_[static_cast<std::size_t>(i) * n_ + j];
  if (!slot) {
    slot = 1;
    ++count_;
  }
}

bool ZeroPattern::contains(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) {
    throw std::out_of_range("ZeroPattern::contains: index out of range");
  }
  return mask_[static_cast<std::size_t>(i) * n_ + j] != 0;
}

std::vector<ZeroPattern::Index> ZeroPattern::pairs() const {
  std::vector<Index> out;
  out.reserve(count_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (mask_[static_cast<std::size_t>(i) * n_ + j]) out.emplace_back(i, j);
  return out;
}

ZeroPattern ZeroPattern::united(const ZeroPattern& other) const {
  if (other.n_ != n_) throw std::invalid_argument("ZeroPattern::united: dimension mismatch");
  ZeroPattern out = *this;
  for (std::size_t k = 0; k < mask_.size(); ++k) {
    if (other.mask_[k] && !out.mask_[k]) {
      out.mask_[k] = 1;
      ++out.count_;
    }
  }
  return out;
}

bool ZeroPattern::includes(const ZeroPattern& other) const {
  if (other.n_ != n_) return false;
  for (std::size_t k = 0; k < mask_.size(); ++k)
    if (other.mask_[k] && !mask_[k]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// PathModel / Problem

PathModel::PathModel(Matrix a, Matrix psi, ZeroPattern pattern)
    : a_(std::move(a)), psi_(std::move(psi)), pattern_(std::move(pattern)) {
  const int n = pattern_.dim();
  require_dim(a_, n, "PathModel A");
  require_dim(psi_, n, "PathModel Psi");
  if (!a_.allFinite() || !psi_.allFinite()) {
    throw std::invalid_argument("PathModel: non-finite entries");
  }
  for (const auto& [i, j] : pattern_.pairs()) {
    if (a_(i, j) != 0.0) {
      throw std::invalid_argument("PathModel: A(" + std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + ") must be zero under the pattern");
    }
  }
  if (!is_symmetric(psi_)) throw std::invalid_argument("PathModel: Psi is not symmetric");
  const auto eig = linalg::eigen_sym(psi_);
  const double top = std::abs(eig.values(n - 1));
  if (eig.values(0) < -kPsdTolerance * std::max(top, 1e-300)) {
    throw std::invalid_argument("PathModel: Psi is not positive semidefinite");
  }
  const Matrix i_minus_a = Matrix::Identity(n, n) - a_;
  Eigen::PartialPivLU<Matrix> lu(i_minus_a);
  if (!(lu.rcond() >= kSingularRcond)) {
    throw NumericalError("PathModel: I - A is singular (rcond " + std::to_string(lu.rcond()) + ")");
  }
}

Problem::Problem(Matrix s, double alpha, double gamma, ZeroPattern pattern)
    : s_(std::move(s)), alpha_(alpha), gamma_(gamma), pattern_(std::move(pattern)) {
  require_dim(s_, pattern_.dim(), "Problem S");
  if (!s_.allFinite()) throw std::invalid_argument("Problem: S has non-finite entries");
  if (!is_symmetric(s_)) throw std::invalid_argument("Problem: S is not symmetric");
  s_ = linalg::symmetrize(s_);
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
    throw std::invalid_argument("Problem: alpha must be positive");
  }
  if (!(gamma_ >= 0.0) || !std::isfinite(gamma_)) {
    throw std::invalid_argument("Problem: gamma must be nonnegative");
  }
  if (!(linalg::min_eigenvalue(s_) > 0.0)) {
    throw NumericalError("Problem: S must be positive definite");
  }
}

// ---------------------------------------------------------------------------
// BlockVariable

BlockVariable BlockVariable::zero(int n) {
  return {Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n)};
}

BlockVariable BlockVariable::from_full(const Matrix& full) {
  if (full.rows() != full.cols() || full.rows() % 2 != 0) {
    throw std::invalid_argument("BlockVariable::from_full: expected a 2n x 2n matrix");
  }
  const Eigen::Index n = full.rows() / 2;
  BlockVariable out;
  out.x1 = linalg::symmetrize(full.topLeftCorner(n, n));
  out.x2 = 0.5 * (full.bottomLeftCorner(n, n) + full.topRightCorner(n, n).transpose());
  out.x4 = linalg::symmetrize(full.bottomRightCorner(n, n));
  return out;
}

Matrix BlockVariable::assemble() const {
  const Eigen::Index n = x1.rows();
  Matrix full(2 * n, 2 * n);
  full.topLeftCorner(n, n) = x1;
  full.topRightCorner(n, n) = x2.transpose();
  full.bottomLeftCorner(n, n) = x2;
  full.bottomRightCorner(n, n) = x4;
  return full;
}

double BlockVariable::squared_norm() const {
  return x1.squaredNorm() + 2.0 * x2.squaredNorm() + x4.squaredNorm();
}

double BlockVariable::norm() const { return std::sqrt(squared_norm()); }

double BlockVariable::dot(const BlockVariable& o) const {
  return (x1.array() * o.x1.array()).sum() + 2.0 * (x2.array() * o.x2.array()).sum() +
         (x4.array() * o.x4.array()).sum();
}

BlockVariable& BlockVariable::operator+=(const BlockVariable& o) {
  x1 += o.x1;
  x2 += o.x2;
  x4 += o.x4;
  return *this;
}

BlockVariable& BlockVariable::operator-=(const BlockVariable& o) {
  x1 -= o.x1;
  x2 -= o.x2;
  x4 -= o.x4;
  return *this;
}

BlockVariable& BlockVariable::operator*=(double s) {
  x1 *= s;
  x2 *= s;
  x4 *= s;
  return *this;
}

BlockVariable operator+(BlockVariable a, const BlockVariable& b) { return a += b; }
BlockVariable operator-(BlockVariable a, const BlockVariable& b) { return a -= b; }
BlockVariable operator*(BlockVariable a, double s) { return a *= s; }
BlockVariable operator*(double s, BlockVariable a) { return a *= s; }

// ---------------------------------------------------------------------------
// Model-level functions

Matrix project_pattern(const Matrix& m, const ZeroPattern& pattern) {
  require_dim(m, pattern.dim(), "project_pattern");
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (const auto& [i, j] : pattern.pairs()) out(i, j) = m(i, j);
  return out;
}

Matrix project_complement(const Matrix& m, const ZeroPattern& pattern) {
  return m - project_pattern(m, pattern);
}

Matrix implied_covariance(const PathModel& model) {
  const int n = model.dim();
  Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) - model.a());
  if (!(lu.rcond() >= kSingularRcond)) throw NumericalError("implied_covariance: I - A is singular");
  const Matrix b = lu.inverse();
  return linalg::symmetrize(b * model.psi() * b.transpose());
}

double kl_divergence(const Matrix& s, const Matrix& sigma) {
  linalg::require_square(s, "kl_divergence");
  require_dim(sigma, static_cast<int>(s.rows()), "kl_divergence Sigma");
  const Matrix sigma_inv = linalg::inverse_spd(sigma);
  const double n = static_cast<double>(s.rows());
  const double d = linalg::log_det_spd(sigma) + (s * sigma_inv).trace() - linalg::log_det_spd(s) - n;
  // d >= 0 analytically; clamp rounding noise at the minimizer.
  return std::max(d, 0.0);
}

long degrees_of_freedom(const ZeroPattern& pattern, bool psi_diagonal, KnownCount known) {
  const long n = pattern.dim();
  const long known_params = known == KnownCount::off_diagonal_pairs ? n * (n - 1) / 2 : n * (n + 1) / 2;
  const long free_a = static_cast<long>(pattern.free_count());
  const long psi_params = psi_diagonal ? n : n * (n + 1) / 2;
  return known_params - (free_a + psi_params);
}

Matrix sample_covariance(const Matrix& data, bool center) {
  if (data.rows() < 2) throw std::invalid_argument("sample_covariance: need at least two rows");
  Matrix centered = data;
  if (center) centered.rowwise() -= data.colwise().mean();
  const double denom = static_cast<double>(data.rows() - 1);
  return linalg::symmetrize(centered.transpose() * centered / denom);
}

double lowrank_gap(const BlockVariable& x) {
  Eigen::LLT<Matrix> llt(linalg::symmetrize(x.x4));
  if (llt.info() != Eigen::Success) throw NumericalError("lowrank_gap: X4 is singular");
  const Matrix approx = x.x2.transpose() * llt.solve(x.x2);
  const double denom = x.x1.norm();
  if (denom == 0.0) throw NumericalError("lowrank_gap: X1 is zero");
  return (x.x1 - approx).norm() / denom;
}

}  // namespace sempath
