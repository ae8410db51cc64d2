#include "lrcert/quadratic_form.hpp"

#include <cmath>
#include <stdexcept>

namespace lrcert {

QuadraticForm QuadraticForm::from_dense(Matrix q) {
  if (q.rows() != q.cols()) {
    throw std::invalid_argument("quadratic form: dense representation must be square");
  }
  const auto nn = q.rows();
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(nn))));
  if (n * n != nn) {
    throw std::invalid_argument("quadratic form: dimension must be a perfect square");
  }
  if ((q - q.transpose()).norm() > 1e-12 * std::max(1.0, q.norm())) {
    throw std::invalid_argument("quadratic form: dense representation must be symmetric");
  }
  QuadraticForm out;
  out.n_ = static_cast<int>(n);
  out.dense_ = 0.5 * (q + q.transpose());
  return out;
}

QuadraticForm QuadraticForm::from_measurements(int n, std::vector<Matrix> measurements,
                                               double scale) {
  QuadraticForm out;
  out.n_ = n;
  out.scale_ = scale;
  out.dense_ = Matrix::Zero(n * n, n * n);
  for (const Matrix& A : measurements) {
    if (A.rows() != n || A.cols() != n) {
      throw std::invalid_argument("quadratic form: measurement matrix has wrong shape");
    }
    const Vector a = A.reshaped();
    out.dense_.noalias() += scale * a * a.transpose();
  }
  out.measurements_ = std::move(measurements);
  return out;
}

double QuadraticForm::operator()(const Matrix& K, const Matrix& L) const {
  if (K.rows() != n_ || K.cols() != n_ || L.rows() != n_ || L.cols() != n_) {
    throw std::invalid_argument("quadratic form: argument has wrong shape");
  }
  return K.reshaped().dot(dense_ * L.reshaped());
}

double QuadraticForm::apply_measurements(const Matrix& K, const Matrix& L) const {
  if (measurements_.empty()) {
    throw std::logic_error("quadratic form: no measurement representation");
  }
  double acc = 0.0;
  for (const Matrix& A : measurements_) {
    acc += A.cwiseProduct(K).sum() * A.cwiseProduct(L).sum();
  }
  return scale_ * acc;
}

double QuadraticForm::operator_norm() const {
  return eig_sym(dense_).values.cwiseAbs().maxCoeff();
}

QuadraticForm QuadraticForm::operator+(const QuadraticForm& other) const {
  return from_dense(dense_ + other.dense_);
}

QuadraticForm QuadraticForm::operator-(const QuadraticForm& other) const {
  return from_dense(dense_ - other.dense_);
}

QuadraticForm QuadraticForm::operator*(double t) const { return from_dense(t * dense_); }

}  // namespace lrcert
