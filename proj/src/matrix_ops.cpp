#include "lrcert/matrix_ops.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace lrcert {

Vector vec(const Matrix& A) {
  if (A.rows() != A.cols()) {
    throw std::invalid_argument("vec: input must be square");
  }
  return A.reshaped();
}

Matrix mat(const Vector& v) {
  const auto dim = v.size();
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(dim))));
  if (n * n != dim) {
    throw std::invalid_argument("mat: dimension is not a perfect square");
  }
  Matrix A = v.reshaped(n, n);
  return 0.5 * (A + A.transpose());
}

Matrix kron(const Matrix& A, const Matrix& B) {
  return Eigen::kroneckerProduct(A, B);
}

Matrix x_operator(const Matrix& X) {
  const Eigen::Index n = X.rows();
  const Eigen::Index r = X.cols();
  Matrix op = Matrix::Zero(n * n, n * r);
  // Column i + n*j corresponds to U = e_i e_j^T, so the image is
  // vec(X e_j e_i^T + e_i (X e_j)^T).
  for (Eigen::Index j = 0; j < r; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      Matrix img = Matrix::Zero(n, n);
      img.col(i) += X.col(j);
      img.row(i) += X.col(j).transpose();
      op.col(i + n * j) = img.reshaped();
    }
  }
  return op;
}

EigenDecomposition eig_sym(const Matrix& A) {
  if (A.rows() != A.cols()) {
    throw std::invalid_argument("eig_sym: input must be square");
  }
  const double asym = (A - A.transpose()).norm();
  if (asym > 1e-12 * std::max(1.0, A.norm())) {
    throw std::invalid_argument("eig_sym: input is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (A + A.transpose()));
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eig_sym: eigensolver failed");
  }
  // Eigen sorts increasing; the contract is decreasing.
  EigenDecomposition out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

SvdResult svd(const Matrix& A) {
  Eigen::JacobiSVD<Matrix> s(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return SvdResult{s.matrixU(), s.singularValues(), s.matrixV()};
}

std::pair<Matrix, Matrix> psd_split(const Matrix& M) {
  EigenDecomposition ed = eig_sym(M);
  const Eigen::Index n = M.rows();
  Matrix plus = Matrix::Zero(n, n);
  Matrix minus = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lam = ed.values[k];
    if (lam > 0.0) {
      plus.noalias() += lam * ed.vectors.col(k) * ed.vectors.col(k).transpose();
    } else if (lam < 0.0) {
      minus.noalias() -= lam * ed.vectors.col(k) * ed.vectors.col(k).transpose();
    }
  }
  return {plus, minus};
}

}  // namespace lrcert
