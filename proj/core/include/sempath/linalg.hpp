#pragma once

#include <Eigen/Dense>

namespace sempath {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// (M + M^T) / 2.
Matrix symmetrize(const Matrix& m);

struct SymmetricEigen {
  Vector values;   // ascending
  Matrix vectors;  // columns are eigenvectors
};

/// Eigendecomposition of the symmetric part of `m`. Throws NumericalError on
/// non-finite input or solver failure.
SymmetricEigen eigen_sym(const Matrix& m);

/// Q f(Lambda) Q^T for a scalar map f applied to each eigenvalue.
template <typename F>
Matrix spectral_map(const SymmetricEigen& eig, F&& f) {
  Vector mapped = eig.values.unaryExpr(f);
  return eig.vectors * mapped.asDiagonal() * eig.vectors.transpose();
}

/// Projects sym(m) onto { X : lo I <= X <= hi I } by eigenvalue clipping.
Matrix clip_spectrum(const Matrix& m, double lo, double hi);

double min_eigenvalue(const Matrix& m);
double max_eigenvalue(const Matrix& m);

/// log det of a symmetric positive definite matrix; throws NumericalError
/// when the Cholesky factorization fails.
double log_det_spd(const Matrix& m);

/// Inverse of a symmetric positive definite matrix; throws NumericalError.
Matrix inverse_spd(const Matrix& m);

bool is_positive_definite(const Matrix& m);

/// Largest absolute entry (elementwise max norm).
double max_abs(const Matrix& m);

void require_square(const Matrix& m, const char* what);

}  // namespace linalg
}  // namespace sempath
