#pragma once

#include <vector>

#include "lrcert/matrix_ops.hpp"

namespace lrcert {

/// A symmetric bilinear form on n x n matrices. Backed by a dense n^2 x n^2
/// matrix, optionally carrying the list of measurement matrices A_i it came
/// from, in which case [Q](K, L) = scale * sum_i <A_i, K> <A_i, L>.
class QuadraticForm {
 public:
  QuadraticForm() = default;

  static QuadraticForm from_dense(Matrix q);
  static QuadraticForm from_measurements(int n, std::vector<Matrix> measurements,
                                         double scale = 1.0);

  /// [Q](K, L).
  double operator()(const Matrix& K, const Matrix& L) const;

  int n() const { return n_; }
  const Matrix& dense() const { return dense_; }
  bool has_measurements() const { return !measurements_.empty(); }
  const std::vector<Matrix>& measurements() const { return measurements_; }
  double measurement_scale() const { return scale_; }

  /// Evaluation through the measurement list (requires has_measurements()).
  double apply_measurements(const Matrix& K, const Matrix& L) const;

  /// Largest absolute eigenvalue of the dense representation: the smallest C
  /// with |[Q](K, L)| <= C ||K||_F ||L||_F.
  double operator_norm() const;

  QuadraticForm operator+(const QuadraticForm& other) const;
  QuadraticForm operator-(const QuadraticForm& other) const;
  QuadraticForm operator*(double t) const;

 private:
  int n_ = 0;
  Matrix dense_;  // n^2 x n^2 symmetric
  std::vector<Matrix> measurements_;
  double scale_ = 1.0;
};

inline QuadraticForm operator*(double t, const QuadraticForm& q) { return q * t; }

}  // namespace lrcert
