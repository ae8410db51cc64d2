#include <doctest.h>

#include <cmath>

#include "lrcert/matrix_ops.hpp"
#include "lrcert/rng.hpp"
#include "lrcert/sdp.hpp"

using namespace lrcert;
using namespace lrcert::sdp;

namespace {

AffineBlock make_block(int dim, int nvars) {
  AffineBlock b;
  b.dim = dim;
  b.constant = Matrix::Zero(dim, dim);
  b.coeffs.resize(nvars);
  return b;
}

// min y subject to [y - 1] >= 0.
SdpProblem scalar_bound_problem() {
  SdpProblem p;
  p.nvars = 1;
  p.objective = Vector::Ones(1);
  AffineBlock b = make_block(1, 1);
  b.constant(0, 0) = -1.0;
  add_coeff(b, 0, 0, 0, 1.0);
  p.blocks.push_back(b);
  return p;
}

// min delta subject to (1-delta) I <= D <= (1+delta) I for fixed D.
SdpProblem diag_envelope_problem(const Vector& d) {
  const int n = static_cast<int>(d.size());
  SdpProblem p;
  p.nvars = 1;
  p.objective = Vector::Ones(1);
  AffineBlock upper = make_block(n, 1);
  upper.constant = Matrix::Identity(n, n) - Matrix(d.asDiagonal());
  AffineBlock lower = make_block(n, 1);
  lower.constant = Matrix(d.asDiagonal()) - Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    add_coeff(upper, 0, i, i, 1.0);
    add_coeff(lower, 0, i, i, 1.0);
  }
  p.blocks.push_back(upper);
  p.blocks.push_back(lower);
  return p;
}

}  // namespace

TEST_CASE("forced scalar bound") {
  SdpSolution s = solve(scalar_bound_problem());
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("2x2 determinant bound") {
  // min y subject to [[y, 1], [1, y]] >= 0, PSD iff y >= 1.
  SdpProblem p;
  p.nvars = 1;
  p.objective = Vector::Ones(1);
  AffineBlock b = make_block(2, 1);
  b.constant(0, 1) = b.constant(1, 0) = 1.0;
  add_coeff(b, 0, 0, 0, 1.0);
  add_coeff(b, 0, 1, 1, 1.0);
  p.blocks.push_back(b);
  SdpSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective_value == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("identity envelope of a fixed diagonal") {
  Vector d(2);
  d << 1.3, 0.8;
  SdpProblem p = diag_envelope_problem(d);
  SdpSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  // max |d_i - 1| by hand
  CHECK(s.objective_value == doctest::Approx(0.3).epsilon(1e-6));

  FeasibilityReport rep = verify(p, s);
  for (double e : rep.block_min_eigenvalues) {
    CHECK(e >= -1e-8);
  }
  CHECK(rep.recomputed_gap <= 1e-7 * (1.0 + std::abs(s.objective_value)));

  // A deliberately corrupted primal reports a violated block.
  SdpSolution bad = s;
  bad.primal[0] -= 0.1;
  FeasibilityReport brep = verify(p, bad);
  double worst = 0.0;
  for (double e : brep.block_min_eigenvalues) {
    worst = std::min(worst, e);
  }
  CHECK(worst < -1e-3);
}

TEST_CASE("largest eigenvalue via LMI") {
  Rng rng(41);
  Matrix A = rng.normal_matrix(6, 6);
  A = (0.5 * (A + A.transpose())).eval();
  SdpProblem p;
  p.nvars = 1;
  p.objective = Vector::Ones(1);
  AffineBlock b = make_block(6, 1);
  b.constant = -A;
  for (int i = 0; i < 6; ++i) {
    add_coeff(b, 0, i, i, 1.0);
  }
  p.blocks.push_back(b);
  SdpSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective_value == doctest::Approx(eig_sym(A).values[0]).epsilon(1e-7));
}

TEST_CASE("equality rows are honored exactly") {
  // min t subject to [t - u] >= 0, [t + u] >= 0, u = 0.7  =>  t* = 0.7.
  SdpProblem p;
  p.nvars = 2;
  p.objective = Vector::Zero(2);
  p.objective[0] = 1.0;
  AffineBlock b1 = make_block(1, 2);
  add_coeff(b1, 0, 0, 0, 1.0);
  add_coeff(b1, 1, 0, 0, -1.0);
  AffineBlock b2 = make_block(1, 2);
  add_coeff(b2, 0, 0, 0, 1.0);
  add_coeff(b2, 1, 0, 0, 1.0);
  p.blocks.push_back(b1);
  p.blocks.push_back(b2);
  p.eq_coeffs = Matrix::Zero(1, 2);
  p.eq_coeffs(0, 1) = 1.0;
  p.eq_rhs = Vector::Constant(1, -0.7);  // u - 0.7 = 0
  SdpSolution s = solve(p);
  REQUIRE(s.status == SolveStatus::kOptimal);
  CHECK(s.objective_value == doctest::Approx(0.7).epsilon(1e-7));
  CHECK(std::abs(s.primal[1] - 0.7) <= 1e-8);

  // A duplicated equality row is dropped without changing the solution.
  SdpProblem pdup = p;
  pdup.eq_coeffs = Matrix::Zero(2, 2);
  pdup.eq_coeffs(0, 1) = 1.0;
  pdup.eq_coeffs(1, 1) = 1.0;
  pdup.eq_rhs = Vector::Constant(2, -0.7);
  SdpSolution sdup = solve(pdup);
  REQUIRE(sdup.status == SolveStatus::kOptimal);
  CHECK(sdup.objective_value == doctest::Approx(0.7).epsilon(1e-7));

  // Contradictory rows are reported as infeasible.
  SdpProblem pcon = p;
  pcon.eq_coeffs = Matrix::Zero(2, 2);
  pcon.eq_coeffs(0, 1) = 1.0;
  pcon.eq_coeffs(1, 1) = 1.0;
  pcon.eq_rhs = Vector::Zero(2);
  pcon.eq_rhs << -0.7, -0.8;
  CHECK(solve(pcon).status == SolveStatus::kInfeasible);
}

TEST_CASE("weak duality along the feasible tail of the path") {
  Vector d(3);
  d << 1.2, 1.0, 0.55;
  SdpProblem p = diag_envelope_problem(d);
  SolverOptions opts;
  SdpSolution s = solve(p, opts);
  REQUIRE(s.status == SolveStatus::kOptimal);
  for (const IterationInfo& it : s.history) {
    if (it.primal_res <= opts.feas_tol && it.dual_res <= opts.feas_tol) {
      CHECK(it.dual_obj <= it.primal_obj + 1e-9 * (1.0 + std::abs(it.primal_obj)));
    }
  }
}

TEST_CASE("scaling the objective scales the value and keeps the optimizer") {
  Vector d(2);
  d << 1.25, 0.9;
  SdpProblem p = diag_envelope_problem(d);
  SdpSolution s1 = solve(p);
  SdpProblem p10 = p;
  p10.objective *= 10.0;
  SdpSolution s10 = solve(p10);
  REQUIRE(s1.status == SolveStatus::kOptimal);
  REQUIRE(s10.status == SolveStatus::kOptimal);
  CHECK(s10.objective_value == doctest::Approx(10.0 * s1.objective_value).epsilon(1e-6));
  CHECK((s1.primal - s10.primal).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("identical inputs give bitwise-identical results") {
  Vector d(2);
  d << 1.3, 0.8;
  SdpProblem p = diag_envelope_problem(d);
  SdpSolution a = solve(p);
  SdpSolution b = solve(p);
  CHECK(a.objective_value == b.objective_value);
  CHECK((a.primal.array() == b.primal.array()).all());
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("infeasible and unbounded inputs are flagged") {
  // y >= 1 and y <= -1 simultaneously.
  SdpProblem inf;
  inf.nvars = 1;
  inf.objective = Vector::Ones(1);
  AffineBlock b1 = make_block(1, 1);
  b1.constant(0, 0) = -1.0;
  add_coeff(b1, 0, 0, 0, 1.0);
  AffineBlock b2 = make_block(1, 1);
  b2.constant(0, 0) = -1.0;
  add_coeff(b2, 0, 0, 0, -1.0);
  inf.blocks.push_back(b1);
  inf.blocks.push_back(b2);
  SdpSolution si = solve(inf);
  CHECK(si.status != SolveStatus::kOptimal);
  CHECK(!si.diagnostics.empty());

  // min -y subject to y >= -1: unbounded below.
  SdpProblem unb;
  unb.nvars = 1;
  unb.objective = -Vector::Ones(1);
  AffineBlock b3 = make_block(1, 1);
  b3.constant(0, 0) = 1.0;
  add_coeff(b3, 0, 0, 0, 1.0);
  unb.blocks.push_back(b3);
  SdpSolution su = solve(unb);
  CHECK(su.status != SolveStatus::kOptimal);
  CHECK(!su.diagnostics.empty());
}

TEST_CASE("construction errors") {
  SdpProblem p;
  p.nvars = 0;
  CHECK_THROWS_AS(solve(p), std::invalid_argument);

  p.nvars = 1;
  p.objective = Vector::Ones(1);
  CHECK_THROWS_AS(solve(p), std::invalid_argument);  // no blocks

  AffineBlock b = make_block(2, 1);
  b.coeffs[0].push_back(SymTriplet{1, 0, 1.0});  // row > col
  p.blocks.push_back(b);
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
}
