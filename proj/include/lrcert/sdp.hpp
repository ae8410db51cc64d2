#pragma once

#include <string>
#include <vector>

#include "lrcert/matrix_ops.hpp"

namespace lrcert::sdp {

/// One entry of a symmetric coefficient matrix: `value` at (row, col) and,
/// when row != col, mirrored at (col, row). Requires row <= col.
struct SymTriplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Affine PSD constraint block: constant + sum_i y_i * coeff_i  >=  0.
struct AffineBlock {
  int dim = 0;
  Matrix constant;                              // dim x dim, symmetric
  std::vector<std::vector<SymTriplet>> coeffs;  // one (possibly empty) list per variable
};

/// Linear objective over y in R^nvars subject to affine PSD blocks and
/// optional affine equality rows  eq_coeffs * y + eq_rhs = 0.
struct SdpProblem {
  int nvars = 0;
  Vector objective;  // minimized
  std::vector<AffineBlock> blocks;
  Matrix eq_coeffs;  // p x nvars; 0 x 0 when absent
  Vector eq_rhs;     // p
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kMaxIter };

const char* to_string(SolveStatus status);

struct SolverOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iterations = 200;
  double step_fraction = 0.98;  // fraction-to-boundary
  double init_scale = 0.0;      // 0 = derive from problem data
  bool verbose = false;
};

struct IterationInfo {
  int iter = 0;
  double mu = 0.0;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double primal_res = 0.0;  // max_k ||F_k(y) - Z_k||_F
  double dual_res = 0.0;    // ||c - A(X) + Q^T nu||_inf
  double eq_res = 0.0;      // ||Q y + q0||_inf
};

struct SdpSolution {
  SolveStatus status = SolveStatus::kMaxIter;
  double objective_value = 0.0;
  Vector primal;                    // y at termination
  std::vector<Matrix> block_duals;  // PSD multiplier per block
  Vector eq_duals;                  // multiplier per equality row (post-reduction)
  double duality_gap = 0.0;         // |primal obj - dual obj|
  int iterations = 0;
  std::string diagnostics;
  std::vector<IterationInfo> history;
};

/// Primal-dual path-following interior-point solve (HKM scaling, Mehrotra
/// predictor-corrector, dense Cholesky on the Schur complement). Deterministic:
/// identical inputs and options produce identical iterates.
SdpSolution solve(const SdpProblem& p, const SolverOptions& opts = {});

struct FeasibilityReport {
  std::vector<double> block_min_eigenvalues;  // of F_k(y), from the primal alone
  std::vector<double> dual_min_eigenvalues;   // of the returned multipliers
  double eq_residual_inf = 0.0;
  double dual_residual_inf = 0.0;  // ||c - A(X) + Q^T nu||_inf
  double recomputed_gap = 0.0;
};

/// Recomputes feasibility and the gap from (p, s) alone, independent of the
/// solver's internal bookkeeping.
FeasibilityReport verify(const SdpProblem& p, const SdpSolution& s);

/// Value of one block at y.
Matrix block_value(const AffineBlock& b, const Vector& y);

/// Appends a coefficient entry (mirrored across the diagonal).
void add_coeff(AffineBlock& b, int var, int row, int col, double value);

/// Sets a variable's coefficient matrix from a dense symmetric matrix,
/// dropping exact zeros.
void set_coeff_dense(AffineBlock& b, int var, const Matrix& C);

}  // namespace lrcert::sdp
