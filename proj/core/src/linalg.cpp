#include "sempath/linalg.hpp"

#include <algorithm>
#include <string>

#include "sempath/error.hpp"

namespace sempath::linalg {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

SymmetricEigen eigen_sym(const Matrix& m) {
  require_square(m, "eigen_sym");
  if (!m.allFinite()) {
    throw NumericalError("eigendecomposition of a matrix with non-finite entries");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m));
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Matrix clip_spectrum(const Matrix& m, double lo, double hi) {
  const auto eig = eigen_sym(m);
  return spectral_map(eig, [lo, hi](double v) { return std::clamp(v, lo, hi); });
}

double min_eigenvalue(const Matrix& m) {
  require_square(m, "min_eigenvalue");
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
  return solver.eigenvalues()(0);
}

double max_eigenvalue(const Matrix& m) {
  require_square(m, "max_eigenvalue");
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue computation failed");
  return solver.eigenvalues()(m.rows() - 1);
}

double log_det_spd(const Matrix& m) {
  require_square(m, "log_det_spd");
  Eigen::LLT<Matrix> llt(symmetrize(m));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("matrix is not positive definite");
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Matrix inverse_spd(const Matrix& m) {
  require_square(m, "inverse_spd");
  Eigen::LLT<Matrix> llt(symmetrize(m));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("matrix is not positive definite");
  }
  return symmetrize(llt.solve(Matrix::Identity(m.rows(), m.cols())));
}

bool is_positive_definite(const Matrix& m) {
  if (m.rows() != m.cols() || !m.allFinite()) return false;
  Eigen::LLT<Matrix> llt(symmetrize(m));
  return llt.info() == Eigen::Success;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square, got " +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace sempath::linalg
