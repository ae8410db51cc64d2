#pragma once

#include <optional>
#include <utility>

#include "lrcert/matrix_ops.hpp"
#include "lrcert/quadratic_form.hpp"
#include "lrcert/sdp.hpp"

namespace lrcert::certify {

/// One certification problem: a candidate spurious point X against a ground
/// truth factor Z, with BDP constant kappa.
struct Instance {
  Matrix X;
  Matrix Z;
  double kappa = 0.0;
  Vector e;     // vec(X X^T - Z Z^T)
  Matrix Xop;   // n^2 x nr, U |-> vec(X U^T + U X^T)
  double a = 0.0;  // 2 kappa sqrt(lambda_1(X X^T)) ||e||
  double b = 0.0;  // 2 kappa ||e||
  double e_norm = 0.0;
  int n = 0;
  int r = 0;
  bool degenerate = false;  // X X^T == Z Z^T
};

Instance build_instance(const Matrix& X, const Matrix& Z, double kappa);

struct CertifyResult {
  double delta = 0.0;
  Matrix H;  // optimal n^2 x n^2 symmetric witness
  sdp::SolveStatus solver_status = sdp::SolveStatus::kMaxIter;
  std::optional<double> analytic_lower_bound;  // rank-1 closed form (r == 1 only)
};

/// Smallest RIP constant delta(X, Z; kappa) consistent with X being a spurious
/// local minimizer against ground truth Z Z^T: the norm/curvature/isometry SDP.
CertifyResult delta_sdp(const Instance& inst, const sdp::SolverOptions& opts = {});

/// First-order-only variant delta_f(X, Z): isometry subject to Xop^T H e = 0.
CertifyResult delta_f_sdp(const Matrix& X, const Matrix& Z,
                          const sdp::SolverOptions& opts = {});

/// The companion maximization eta(x, z; kappa) (full variant requires r == 1)
/// or eta_f(X, Z) when first_order_only is set.
double eta_sdp(const Instance& inst, bool first_order_only,
               const sdp::SolverOptions& opts = {});

/// Decomposition data of a rank-1 pair: z = c1 x + c2 w with w a unit vector
/// orthogonal to x, and e = ||e|| (sqrt(1-alpha^2) Xop yhat - alpha (w kron w)).
struct Rank1Geometry {
  double alpha = 0.0;  // c2^2 / ||e||  (= ||z||^2/||e|| when x = 0)
  double beta = 0.0;   // ||x||^2 / ||e||
  Vector w;
  Vector yhat;  // ||Xop yhat|| = 1 when x != 0; zero vector when x = 0
  double c1 = 0.0;
  double c2 = 0.0;
};

Rank1Geometry rank1_geometry(const Vector& x, const Vector& z);

/// Two-branch closed form for the kappa = 0 dual bound.
double eta0(const Vector& x, const Vector& z);

/// (1 - eta0 - 2(1+sqrt2) kappa) / (1 + eta0 + 2(1+sqrt2) kappa), clamped at 0.
double delta_lower_bound_rank1(const Vector& x, const Vector& z, double kappa);

struct Thresholds {
  double global_delta = 0.0;  // rank-1 global guarantee, clamped at 0
  double local_delta = 0.0;   // rank-r local guarantee at radius epsilon
  double epsilon_max = 0.0;   // 2(sqrt2 - 1)
};

/// Certification thresholds; epsilon must lie in (0, 2(sqrt2-1)].
Thresholds thresholds(double kappa, double epsilon);

/// Explicit feasible point of the dual of the eta maximization; its objective
/// upper-bounds eta, hence lower-bounds delta through the sandwich.
struct DualCertificate {
  Matrix U1;
  Matrix U2;
  Matrix V;       // n x n PSD (zero when unused)
  Matrix G;
  double lambda = 0.0;
  Vector y;
  double objective = 0.0;
};

/// Rank-1 certificate at mixing weight gamma in [0, alpha].
DualCertificate dual_certificate_rank1(const Vector& x, const Vector& z, double kappa,
                                       double gamma);

/// Certificate minimized over the gamma grid (100 uniform points on [0, alpha]
/// plus the interior stationary point when one exists).
DualCertificate best_dual_certificate_rank1(const Vector& x, const Vector& z,
                                            double kappa);

/// First-order certificate for aligned factors (X^T Z symmetric PSD); its
/// objective is (1 - cos theta)/(1 + cos theta) for the angle theta between
/// e and Xop y.
DualCertificate dual_certificate_local(const Matrix& X, const Matrix& Z);

/// cos(theta) between e and the certificate direction, as a function of the
/// mixing weight gamma (rank-1 geometry with parameter alpha).
double certificate_cosine(double gamma, double alpha);

/// Dual objective at kappa = 0: (2 beta gamma + 1 - psi)/(1 + psi).
double certificate_objective_kappa0(double gamma, double alpha, double beta);

/// Returns X R with R orthogonal from the SVD of X^T Z, so that (XR)^T Z is
/// symmetric PSD and (XR)(XR)^T = X X^T.
Matrix align_factors(const Matrix& X, const Matrix& Z);

/// Both sides of the aligned-factor error inequality:
/// lambda_r(ZZ^T) ||Z - X||_F^2  <=  (1/(2(sqrt2-1))) ||ZZ^T - XX^T||_F^2.
std::pair<double, double> error_ratio_check(const Matrix& X, const Matrix& Z);

/// Normalized deviation |[Q](K, L) - <K, L>| / (||K||_F ||L||_F); the inputs
/// must have rank at most rank_budget.
double rop_gap(const QuadraticForm& Q, const Matrix& K, const Matrix& L,
               int rank_budget);

}  // namespace lrcert::certify
