#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "lrcert/matrix_ops.hpp"

namespace lrcert {

/// Seedable PRNG with a fully specified normal generator (Box-Muller over
/// mt19937_64), so identical seeds reproduce identical streams on any
/// platform. std::normal_distribution is implementation-defined and is
/// deliberately not used.
class Rng {
 public:
  static constexpr const char* kName = "mt19937_64+box-muller";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    // 53-bit mantissa uniform in (0, 1].
    const std::uint64_t bits = engine_();
    return (double(bits >> 11) + 1.0) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  bool bernoulli(double p) { return uniform01() <= p; }

  /// Matrix with i.i.d. N(0, sigma^2) entries, filled row by row.
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols, double sigma = 1.0) {
    Matrix A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        A(i, j) = sigma * normal();
      }
    }
    return A;
  }

  Vector normal_vector(Eigen::Index dim, double sigma = 1.0) {
    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      v[i] = sigma * normal();
    }
    return v;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lrcert
