#pragma once

#include <Eigen/Dense>

namespace lrcert {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Spectral factorization of a symmetric matrix with eigenvalues sorted in
/// decreasing order and orthonormal eigenvectors in the matching column order.
struct EigenDecomposition {
  Vector values;
  Matrix vectors;
};

/// Stacks the columns of A into a vector of length rows*cols.
Vector vec(const Matrix& A);

/// Symmetric matricization: returns (A + A^T)/2 where vec(A) = v.
/// The dimension of v must be a perfect square.
Matrix mat(const Vector& v);

/// Kronecker product A (x) B, satisfying vec(A*X*B^T) = (B (x) A) vec(X).
Matrix kron(const Matrix& A, const Matrix& B);

/// The linear operator of a factor X in R^{n x r}: the n^2 x nr matrix
/// satisfying x_operator(X) * vec(U) = vec(X U^T + U X^T) for all U.
Matrix x_operator(const Matrix& X);

/// Symmetric eigendecomposition. Requires ||A - A^T||_F <= 1e-12 * max(1, ||A||_F).
EigenDecomposition eig_sym(const Matrix& A);

struct SvdResult {
  Matrix U;
  Vector singular_values;  // nonnegative, decreasing
  Matrix V;
};

SvdResult svd(const Matrix& A);

/// Splits a symmetric M into (Mplus, Mminus) with Mplus, Mminus >= 0,
/// Mplus - Mminus = M and <Mplus, Mminus> = 0. Eigenvalues equal to zero
/// contribute to neither part.
std::pair<Matrix, Matrix> psd_split(const Matrix& M);

}  // namespace lrcert
