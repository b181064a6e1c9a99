#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sempath/linalg.hpp"

namespace sempath {

/// Relative tolerance (w.r.t. the largest eigenvalue) for PSD validation.
inline constexpr double kPsdTolerance = 1e-8;
/// Reciprocal condition number below which I - A counts as singular.
inline constexpr double kSingularRcond = 1e-12;

/// Index set of path-matrix entries constrained to zero.
///
/// Indices are 0-based in memory. The diagonal is always a member: a pattern
/// built from any list of pairs has every (i, i) added. Files and JSON use
/// 1-based pairs (see io.hpp).
class ZeroPattern {
 public:
  using Index = std::pair<int, int>;

  /// Diagonal-only pattern of dimension n.
  explicit ZeroPattern(int n);
  /// Diagonal plus the given pairs. Throws std::out_of_range for pairs
  /// outside [0, n). Duplicates collapse.
  ZeroPattern(int n, std::span<const Index> pairs);

  static ZeroPattern diagonal(int n) { return ZeroPattern(n); }
  /// Every entry fixed: forces A = 0.
  static ZeroPattern full(int n);

  int dim() const noexcept { return n_; }
  bool contains(int i, int j) const;
  /// |I_A|, diagonal included.
  std::size_t size() const noexcept { return count_; }
  /// Number of entries of A left free (n^2 - |I_A|).
  std::size_t free_count() const noexcept {
    return static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_) - count_;
  }
  /// Members in row-major order.
  std::vector<Index> pairs() const;

  ZeroPattern united(const ZeroPattern& other) const;
  bool includes(const ZeroPattern& other) const;

  friend bool operator==(const ZeroPattern&, const ZeroPattern&) = default;

 private:
  void insert(int i, int j);

  int n_;
  std::vector<unsigned char> mask_;  // row-major n x n
  std::size_t count_ = 0;
};

/// Path model Y = AY + e with cov(e) = Psi, under a zero hypothesis on A.
class PathModel {
 public:
  /// Validates: A has zero diagonal and is exactly zero on `pattern`, Psi is
  /// symmetric PSD (to kPsdTolerance), I - A is nonsingular. Throws
  /// std::invalid_argument / NumericalError otherwise.
  PathModel(Matrix a, Matrix psi, ZeroPattern pattern);

  const Matrix& a() const noexcept { return a_; }
  const Matrix& psi() const noexcept { return psi_; }
  const ZeroPattern& pattern() const noexcept { return pattern_; }
  int dim() const noexcept { return pattern_.dim(); }

 private:
  Matrix a_;
  Matrix psi_;
  ZeroPattern pattern_;
};

/// Everything that defines one convex solve: sample covariance S, bound alpha
/// on Psi, penalty gamma (0 for the confirmatory problem), and the pattern.
class Problem {
 public:
  Problem(Matrix s, double alpha, double gamma, ZeroPattern pattern);

  const Matrix& s() const noexcept { return s_; }
  double alpha() const noexcept { return alpha_; }
  double gamma() const noexcept { return gamma_; }
  const ZeroPattern& pattern() const noexcept { return pattern_; }
  int dim() const noexcept { return pattern_.dim(); }

 private:
  Matrix s_;
  double alpha_;
  double gamma_;
  ZeroPattern pattern_;
};

/// Symmetric 2n x 2n variable [[X1, X2^T], [X2, X4]] held as its three blocks.
///
/// Arithmetic and the norm act on the assembled matrix, so the off-diagonal
/// block counts twice in inner products.
struct BlockVariable {
  Matrix x1;  // n x n symmetric
  Matrix x2;  // n x n general
  Matrix x4;  // n x n symmetric

  static BlockVariable zero(int n);
  /// Splits a 2n x 2n matrix; the off-diagonal block is taken from the
  /// symmetric part.
  static BlockVariable from_full(const Matrix& full);

  int dim() const noexcept { return static_cast<int>(x1.rows()); }
  Matrix assemble() const;

  /// Frobenius norm of the assembled matrix.
  double norm() const;
  double squared_norm() const;
  /// Frobenius inner product of the assembled matrices.
  double dot(const BlockVariable& other) const;

  BlockVariable& operator+=(const BlockVariable& o);
  BlockVariable& operator-=(const BlockVariable& o);
  BlockVariable& operator*=(double s);
};

BlockVariable operator+(BlockVariable a, const BlockVariable& b);
BlockVariable operator-(BlockVariable a, const BlockVariable& b);
BlockVariable operator*(BlockVariable a, double s);
BlockVariable operator*(double s, BlockVariable a);

/// Keeps the entries indexed by `pattern`, zeroes the rest.
Matrix project_pattern(const Matrix& m, const ZeroPattern& pattern);
/// m - project_pattern(m, pattern).
Matrix project_complement(const Matrix& m, const ZeroPattern& pattern);

/// Sigma = (I - A)^{-1} Psi (I - A)^{-T}.
Matrix implied_covariance(const PathModel& model);

/// d(S, Sigma) = log det Sigma + tr(S Sigma^{-1}) - log det S - n.
double kl_divergence(const Matrix& s, const Matrix& sigma);

/// How many moments the sample covariance is taken to supply.
enum class KnownCount {
  off_diagonal_pairs,  // n(n-1)/2
  covariance_entries,  // n(n+1)/2, the usual SEM count
};

/// Known minus estimated parameter count. Estimated = free entries of A plus
/// n (diagonal Psi) or n(n+1)/2 (full symmetric Psi).
long degrees_of_freedom(const ZeroPattern& pattern, bool psi_diagonal,
                        KnownCount known = KnownCount::off_diagonal_pairs);

/// Sample covariance of the rows of `data` with 1/(N-1) normalization.
Matrix sample_covariance(const Matrix& data, bool center = true);

/// ||X1 - X2^T X4^{-1} X2||_F / ||X1||_F. Throws NumericalError if X4 is
/// singular.
double lowrank_gap(const BlockVariable& x);

}  // namespace sempath
