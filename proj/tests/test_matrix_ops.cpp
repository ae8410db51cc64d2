#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lrcert/matrix_io.hpp"
#include "lrcert/matrix_ops.hpp"
#include "lrcert/rng.hpp"

using namespace lrcert;

TEST_CASE("vec stacks columns") {
  Matrix I2 = Matrix::Identity(2, 2);
  Vector v = vec(I2);
  CHECK(v.size() == 4);
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 0.0);
  CHECK(v[2] == 0.0);
  CHECK(v[3] == 1.0);

  Matrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(vec(rect), std::invalid_argument);
}

TEST_CASE("mat is the symmetric matricization") {
  Matrix S = Matrix::Zero(2, 2);
  S(0, 0) = 1.0;
  S(1, 1) = 2.0;
  CHECK((mat(vec(S)) - S).norm() == 0.0);

  Vector v(4);
  v << 0, 1, 0, 0;
  Matrix A = mat(v);
  CHECK(A(0, 1) == 0.5);
  CHECK(A(1, 0) == 0.5);
  CHECK(A(0, 0) == 0.0);
  CHECK(A(1, 1) == 0.0);

  Vector bad(3);
  bad.setZero();
  CHECK_THROWS_AS(mat(bad), std::invalid_argument);
}

TEST_CASE("vec/mat adjointness") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    Matrix A = rng.normal_matrix(4, 4);
    Matrix B = rng.normal_matrix(4, 4);
    const double lhs = vec(A).dot(vec(B));
    const double rhs = A.cwiseProduct(B).sum();
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("kron basics and the vec identity") {
  CHECK((kron(Matrix::Identity(2, 2), Matrix::Identity(2, 2)) - Matrix::Identity(4, 4))
            .norm() == 0.0);

  Matrix A = Vector::LinSpaced(2, 1, 2).asDiagonal();
  Matrix B(2, 2);
  B.setZero();
  B(0, 0) = 1.0;
  B(1, 1) = 3.0;
  Vector expected(4);
  expected << 1, 3, 2, 6;
  CHECK((kron(A, B).diagonal() - expected).norm() == 0.0);

  Rng rng(5);
  for (int rep = 0; rep < 50; ++rep) {
    Matrix A2 = rng.normal_matrix(2, 2);
    Matrix B2 = rng.normal_matrix(2, 2);
    Matrix X = rng.normal_matrix(2, 2);
    Vector lhs = vec(A2 * X * B2.transpose());
    Vector rhs = kron(B2, A2) * X.reshaped();
    CHECK((lhs - rhs).norm() <= 1e-12);
  }
}

TEST_CASE("x_operator matches its defining identity") {
  // X = e1 (n=2, r=1), U = e2.
  Matrix X(2, 1);
  X << 1, 0;
  Matrix op = x_operator(X);
  Vector u(2);
  u << 0, 1;
  Vector img = op * u;
  Vector expected(4);
  expected << 0, 1, 1, 0;
  CHECK((img - expected).norm() == 0.0);

  CHECK(x_operator(Matrix::Zero(3, 2)).norm() == 0.0);

  Rng rng(17);
  for (int n = 2; n <= 6; ++n) {
    for (int r = 1; r <= 3; ++r) {
      Matrix Xr = rng.normal_matrix(n, r);
      Matrix opr = x_operator(Xr);
      Matrix U = rng.normal_matrix(n, r);
      Vector lhs = opr * U.reshaped();
      Vector rhs = vec(Xr * U.transpose() + U * Xr.transpose());
      CHECK((lhs - rhs).norm() <= 1e-12 * std::max(1.0, rhs.norm()));
    }
  }
}

TEST_CASE("rank-1 x_operator norm identity") {
  Rng rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    Vector x = rng.normal_vector(4);
    Vector u = rng.normal_vector(4);
    Matrix op = x_operator(x);
    const double lhs = (op * u).squaredNorm();
    const double rhs = 2.0 * x.squaredNorm() * u.squaredNorm() + 2.0 * std::pow(x.dot(u), 2);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, rhs));
  }
}

TEST_CASE("eig_sym contract") {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = 1.0;
  EigenDecomposition ed = eig_sym(D);
  CHECK(ed.values[0] == doctest::Approx(3.0));
  CHECK(ed.values[1] == doctest::Approx(1.0));

  Matrix notsym(2, 2);
  notsym << 0, 1, 0, 0;
  CHECK_THROWS_AS(eig_sym(notsym), std::invalid_argument);

  Rng rng(3);
  Matrix A = rng.normal_matrix(4, 4);
  A = (0.5 * (A + A.transpose())).eval();
  ed = eig_sym(A);
  Matrix rec = ed.vectors * ed.values.asDiagonal() * ed.vectors.transpose();
  CHECK((rec - A).norm() <= 1e-10 * std::max(1.0, A.norm()));
  CHECK((ed.vectors.transpose() * ed.vectors - Matrix::Identity(4, 4)).norm() <= 1e-12 * 4);
  for (int i = 0; i + 1 < 4; ++i) {
    CHECK(ed.values[i] >= ed.values[i + 1]);
  }
  for (int i = 0; i < 4; ++i) {
    CHECK((A * ed.vectors.col(i) - ed.values[i] * ed.vectors.col(i)).norm() <=
          1e-10 * std::max(1.0, A.norm()));
  }
}

TEST_CASE("svd contract") {
  Matrix neg(1, 1);
  neg(0, 0) = -2.0;
  SvdResult s = svd(neg);
  CHECK(s.singular_values[0] == doctest::Approx(2.0));

  Rng rng(7);
  Matrix A = rng.normal_matrix(4, 3);
  s = svd(A);
  Matrix rec = s.U * s.singular_values.asDiagonal() * s.V.transpose();
  CHECK((rec - A).norm() <= 1e-10 * A.norm());
  for (int i = 0; i + 1 < s.singular_values.size(); ++i) {
    CHECK(s.singular_values[i] >= s.singular_values[i + 1]);
    CHECK(s.singular_values[i + 1] >= 0.0);
  }
}

TEST_CASE("psd_split splits along the spectrum") {
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = -2.0;
  auto [plus, minus] = psd_split(D);
  CHECK(plus(0, 0) == doctest::Approx(1.0));
  CHECK(plus(1, 1) == doctest::Approx(0.0));
  CHECK(minus(0, 0) == doctest::Approx(0.0));
  CHECK(minus(1, 1) == doctest::Approx(2.0));

  Rng rng(29);
  Matrix B = rng.normal_matrix(3, 3);
  Matrix psd = B * B.transpose();
  auto [p2, m2] = psd_split(psd);
  CHECK((p2 - psd).norm() <= 1e-10 * psd.norm());
  CHECK(m2.norm() <= 1e-10 * psd.norm());

  for (int rep = 0; rep < 50; ++rep) {
    Matrix C = rng.normal_matrix(5, 5);
    C = (0.5 * (C + C.transpose())).eval();
    auto [cp, cm] = psd_split(C);
    CHECK((cp - cm - C).norm() <= 1e-10 * std::max(1.0, C.norm()));
    CHECK(std::abs(cp.cwiseProduct(cm).sum()) <= 1e-9 * std::max(1.0, C.squaredNorm()));
    CHECK(eig_sym(cp).values.minCoeff() >= -1e-10);
    CHECK(eig_sym(cm).values.minCoeff() >= -1e-10);
  }
}

TEST_CASE("spectrum of u v^T + v u^T") {
  Rng rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    Vector u = rng.normal_vector(5);
    Vector v = rng.normal_vector(5);
    Matrix M = u * v.transpose() + v * u.transpose();
    const double cosang = u.dot(v) / (u.norm() * v.norm());
    const double lp = u.norm() * v.norm() * (1 + cosang);
    const double lm = -u.norm() * v.norm() * (1 - cosang);
    Vector vals = eig_sym(M).values;
    CHECK(std::abs(vals[0] - lp) <= 1e-10 * std::max(1.0, std::abs(lp)));
    CHECK(std::abs(vals[4] - lm) <= 1e-10 * std::max(1.0, std::abs(lm)));
    for (int i = 1; i < 4; ++i) {
      CHECK(std::abs(vals[i]) <= 1e-10 * u.norm() * v.norm());
    }
    // trace of the positive part, per the angle formula
    auto [mp, mm] = psd_split(M);
    CHECK(mp.trace() ==
          doctest::Approx(u.norm() * v.norm() * (1 + cosang)).epsilon(1e-9));
  }
}

TEST_CASE("matrix text format round trip") {
  Rng rng(37);
  Matrix A = rng.normal_matrix(3, 4);
  std::stringstream ss;
  write_matrix(ss, A);
  Matrix B = read_matrix(ss);
  CHECK((A - B).norm() == 0.0);

  std::stringstream sci("2 2\n1e-3 2.5E+2\n-3.25e0 4\n");
  Matrix C = read_matrix(sci);
  CHECK(C(0, 0) == doctest::Approx(1e-3));
  CHECK(C(0, 1) == doctest::Approx(250.0));
  CHECK(C(1, 0) == doctest::Approx(-3.25));

  std::stringstream short_file("2 2\n1 2\n3\n");
  CHECK_THROWS_AS(read_matrix(short_file), std::invalid_argument);
  std::stringstream no_header("abc\n");
  CHECK_THROWS_AS(read_matrix(no_header), std::invalid_argument);
  std::stringstream bad_dims("0 2\n");
  CHECK_THROWS_AS(read_matrix(bad_dims), std::invalid_argument);
}
