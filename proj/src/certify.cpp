#include "lrcert/certify.hpp"

#include <cmath>
#include <stdexcept>

namespace lrcert::certify {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Variable layout of the certification SDPs: index 0 is the scalar (delta or
// eta), then the upper triangle of H row by row.
int h_index(int p, int q, int N) { return 1 + p * N - p * (p - 1) / 2 + (q - p); }

int num_vars(int N) { return 1 + N * (N + 1) / 2; }

double clamped_sqrt(double t) { return std::sqrt(std::max(t, 0.0)); }

// S_pq e as a dense length-n^2 vector, where S_pq is the unit symmetric
// matrix with ones at (p, q) and (q, p).
void add_s_times_e(const Vector& e, int p, int q, Vector& out) {
  out[p] += e[q];
  if (p != q) {
    out[q] += e[p];
  }
}

Matrix sym_matricize(const Vector& v, int n) {
  Matrix A = v.reshaped(n, n);
  return 0.5 * (A + A.transpose());
}

// Blocks (1 + s) I - H  >= 0 and H - (1 - s) I >= 0, shared by every
// certification SDP; s is variable 0.
void add_isometry_blocks(sdp::SdpProblem& prob, int N, bool scalar_in_upper) {
  sdp::AffineBlock upper;
  upper.dim = N;
  upper.constant = Matrix::Identity(N, N);
  upper.coeffs.resize(prob.nvars);
  sdp::AffineBlock lower;
  lower.dim = N;
  lower.constant = -Matrix::Identity(N, N);
  lower.coeffs.resize(prob.nvars);
  for (int d = 0; d < N; ++d) {
    if (scalar_in_upper) {
      sdp::add_coeff(upper, 0, d, d, 1.0);
    }
    sdp::add_coeff(lower, 0, d, d, 1.0);
  }
  for (int p = 0; p < N; ++p) {
    for (int q = p; q < N; ++q) {
      const int i = h_index(p, q, N);
      sdp::add_coeff(upper, i, p, q, -1.0);
      sdp::add_coeff(lower, i, p, q, 1.0);
    }
  }
  prob.blocks.push_back(std::move(upper));
  prob.blocks.push_back(std::move(lower));
}

// Bordered norm block [[I_nr, t(h)], [t(h)^T, a^2]] for ||Xop^T H e|| <= a,
// or the equality rows Xop^T H e = 0 when a vanishes.
void add_gradient_constraint(sdp::SdpProblem& prob, const Instance& inst) {
  const int N = inst.n * inst.n;
  const int nr = inst.n * inst.r;
  const bool as_equality = inst.a < 1e-10;
  sdp::AffineBlock border;
  if (!as_equality) {
    border.dim = nr + 1;
    border.constant = Matrix::Identity(nr + 1, nr + 1);
    border.constant(nr, nr) = inst.a * inst.a;
    border.coeffs.resize(prob.nvars);
  } else {
    prob.eq_coeffs = Matrix::Zero(nr, prob.nvars);
    prob.eq_rhs = Vector::Zero(nr);
  }
  for (int p = 0; p < N; ++p) {
    for (int q = p; q < N; ++q) {
      // Border vector Xop^T (S_pq e).
      Vector t = inst.e[q] * inst.Xop.row(p).transpose();
      if (p != q) {
        t += inst.e[p] * inst.Xop.row(q).transpose();
      }
      const int i = h_index(p, q, N);
      if (!as_equality) {
        for (int k = 0; k < nr; ++k) {
          sdp::add_coeff(border, i, k, nr, t[k]);
        }
      } else {
        prob.eq_coeffs.col(i) = t;
      }
    }
  }
  if (!as_equality) {
    prob.blocks.push_back(std::move(border));
  }
}

Matrix kron_identity(int r, const Matrix& A) {
  const int n = static_cast<int>(A.rows());
  Matrix out = Matrix::Zero(n * r, n * r);
  for (int k = 0; k < r; ++k) {
    out.block(k * n, k * n, n, n) = A;
  }
  return out;
}

void require_not_degenerate(const Instance& inst) {
  if (inst.degenerate) {
    throw std::domain_error("certify: degenerate pair (X X^T = Z Z^T)");
  }
}

CertifyResult extract_result(const sdp::SdpSolution& sol, int N) {
  CertifyResult res;
  res.solver_status = sol.status;
  res.delta = sol.objective_value;
  res.H = Matrix::Zero(N, N);
  for (int p = 0; p < N; ++p) {
    for (int q = p; q < N; ++q) {
      res.H(p, q) = res.H(q, p) = sol.primal[h_index(p, q, N)];
    }
  }
  return res;
}

}  // namespace

Instance build_instance(const Matrix& X, const Matrix& Z, double kappa) {
  if (X.rows() != Z.rows() || X.cols() != Z.cols()) {
    throw std::invalid_argument("build_instance: X and Z must have the same shape");
  }
  if (kappa < 0.0) {
    throw std::invalid_argument("build_instance: kappa must be nonnegative");
  }
  Instance inst;
  inst.X = X;
  inst.Z = Z;
  inst.kappa = kappa;
  inst.n = static_cast<int>(X.rows());
  inst.r = static_cast<int>(X.cols());
  const Matrix gram_x = X * X.transpose();
  const Matrix gram_z = Z * Z.transpose();
  inst.e = vec(gram_x - gram_z);
  inst.e_norm = inst.e.norm();
  inst.Xop = x_operator(X);
  const double lam1 = std::max(eig_sym(gram_x).values[0], 0.0);
  inst.a = 2.0 * kappa * std::sqrt(lam1) * inst.e_norm;
  inst.b = 2.0 * kappa * inst.e_norm;
  inst.degenerate =
      inst.e_norm <= 1e-12 * std::max(1.0, gram_x.norm() + gram_z.norm());
  return inst;
}

CertifyResult delta_sdp(const Instance& inst, const sdp::SolverOptions& opts) {
  require_not_degenerate(inst);
  const int N = inst.n * inst.n;
  const int nr = inst.n * inst.r;
  sdp::SdpProblem prob;
  prob.nvars = num_vars(N);
  prob.objective = Vector::Zero(prob.nvars);
  prob.objective[0] = 1.0;

  add_gradient_constraint(prob, inst);

  // Curvature block: 2 I_r (x) mat(H e) + Xop^T H Xop + b I >= 0.
  sdp::AffineBlock curv;
  curv.dim = nr;
  curv.constant = inst.b * Matrix::Identity(nr, nr);
  curv.coeffs.resize(prob.nvars);
  Vector se = Vector::Zero(N);
  for (int p = 0; p < N; ++p) {
    for (int q = p; q < N; ++q) {
      se.setZero();
      add_s_times_e(inst.e, p, q, se);
      Matrix coeff = 2.0 * kron_identity(inst.r, sym_matricize(se, inst.n));
      coeff.noalias() += inst.Xop.row(p).transpose() * inst.Xop.row(q);
      if (p != q) {
        coeff.noalias() += inst.Xop.row(q).transpose() * inst.Xop.row(p);
      }
      sdp::set_coeff_dense(curv, h_index(p, q, N), coeff);
    }
  }
  prob.blocks.push_back(std::move(curv));

  add_isometry_blocks(prob, N, /*scalar_in_upper=*/true);

  const sdp::SdpSolution sol = sdp::solve(prob, opts);
  CertifyResult res = extract_result(sol, N);
  if (inst.r == 1) {
    res.analytic_lower_bound =
        delta_lower_bound_rank1(inst.X.col(0), inst.Z.col(0), inst.kappa);
  }
  return res;
}

CertifyResult delta_f_sdp(const Matrix& X, const Matrix& Z,
                          const sdp::SolverOptions& opts) {
  Instance inst = build_instance(X, Z, 0.0);
  require_not_degenerate(inst);
  const int N = inst.n * inst.n;
  sdp::SdpProblem prob;
  prob.nvars = num_vars(N);
  prob.objective = Vector::Zero(prob.nvars);
  prob.objective[0] = 1.0;
  add_gradient_constraint(prob, inst);  // a = 0: equality rows
  add_isometry_blocks(prob, N, /*scalar_in_upper=*/true);
  const sdp::SdpSolution sol = sdp::solve(prob, opts);
  return extract_result(sol, N);
}

double eta_sdp(const Instance& inst, bool first_order_only,
               const sdp::SolverOptions& opts) {
  require_not_degenerate(inst);
  if (!first_order_only && inst.r != 1) {
    throw std::invalid_argument("eta_sdp: the full variant requires r == 1");
  }
  const int N = inst.n * inst.n;
  const int nr = inst.n * inst.r;
  sdp::SdpProblem prob;
  prob.nvars = num_vars(N);
  prob.objective = Vector::Zero(prob.nvars);
  prob.objective[0] = -1.0;  // maximize eta

  if (first_order_only) {
    Instance foc = inst;
    foc.a = 0.0;
    add_gradient_constraint(prob, foc);
  } else {
    add_gradient_constraint(prob, inst);

    // 2 mat(H e) + Xop^T Xop + b I >= 0 (constant second term).
    sdp::AffineBlock curv;
    curv.dim = nr;
    curv.constant = inst.Xop.transpose() * inst.Xop +
                    inst.b * Matrix::Identity(nr, nr);
    curv.coeffs.resize(prob.nvars);
    Vector se = Vector::Zero(N);
    for (int p = 0; p < N; ++p) {
      for (int q = p; q < N; ++q) {
        se.setZero();
        add_s_times_e(inst.e, p, q, se);
        sdp::set_coeff_dense(curv, h_index(p, q, N),
                             2.0 * sym_matricize(se, inst.n));
      }
    }
    prob.blocks.push_back(std::move(curv));
  }

  // eta I <= H <= I.
  sdp::AffineBlock upper;
  upper.dim = N;
  upper.constant = Matrix::Identity(N, N);
  upper.coeffs.resize(prob.nvars);
  sdp::AffineBlock lower;
  lower.dim = N;
  lower.constant = Matrix::Zero(N, N);
  lower.coeffs.resize(prob.nvars);
  for (int d = 0; d < N; ++d) {
    sdp::add_coeff(lower, 0, d, d, -1.0);
  }
  for (int p = 0; p < N; ++p) {
    for (int q = p; q < N; ++q) {
      const int i = h_index(p, q, N);
      sdp::add_coeff(upper, i, p, q, -1.0);
      sdp::add_coeff(lower, i, p, q, 1.0);
    }
  }
  prob.blocks.push_back(std::move(upper));
  prob.blocks.push_back(std::move(lower));

  const sdp::SdpSolution sol = sdp::solve(prob, opts);
  return -sol.objective_value;
}

Rank1Geometry rank1_geometry(const Vector& x, const Vector& z) {
  const int n = static_cast<int>(x.size());
  if (z.size() != n) {
    throw std::invalid_argument("rank1_geometry: dimension mismatch");
  }
  if (n < 2) {
    throw std::invalid_argument("rank1_geometry: dimension must be at least 2");
  }
  const Matrix gram = x * x.transpose() - z * z.transpose();
  const double e_norm = gram.norm();
  if (e_norm <= 1e-12 * std::max(1.0, x.squaredNorm() + z.squaredNorm())) {
    throw std::domain_error("rank1_geometry: degenerate pair (x x^T = z z^T)");
  }
  Rank1Geometry geo;
  if (x.norm() == 0.0) {
    geo.alpha = z.squaredNorm() / e_norm;  // = 1
    geo.beta = 0.0;
    geo.c1 = 0.0;
    geo.c2 = z.norm();
    geo.w = z / z.norm();
    geo.yhat = Vector::Zero(n);
    return geo;
  }
  geo.c1 = x.dot(z) / x.squaredNorm();
  const Vector residual = z - geo.c1 * x;
  geo.c2 = residual.norm();
  if (geo.c2 > 1e-14 * std::max(1.0, z.norm())) {
    geo.w = residual / geo.c2;
  } else {
    geo.c2 = 0.0;
    // Collinear pair: any unit vector orthogonal to x completes the frame.
    int pivot = 0;
    x.cwiseAbs().minCoeff(&pivot);
    Vector cand = Vector::Unit(n, pivot);
    cand -= x * (x.dot(cand) / x.squaredNorm());
    geo.w = cand / cand.norm();
  }
  geo.alpha = geo.c2 * geo.c2 / e_norm;
  geo.beta = x.squaredNorm() / e_norm;
  const Vector ytilde = 0.5 * (1.0 - geo.c1 * geo.c1) * x - geo.c1 * geo.c2 * geo.w;
  const double xy_norm = std::sqrt(2.0 * x.squaredNorm() * ytilde.squaredNorm() +
                                   2.0 * std::pow(x.dot(ytilde), 2));
  geo.yhat = ytilde / xy_norm;
  return geo;
}

double certificate_cosine(double gamma, double alpha) {
  return gamma * alpha + clamped_sqrt(1.0 - gamma * gamma) * clamped_sqrt(1.0 - alpha * alpha);
}

double certificate_objective_kappa0(double gamma, double alpha, double beta) {
  const double psi = certificate_cosine(gamma, alpha);
  return (2.0 * beta * gamma + 1.0 - psi) / (1.0 + psi);
}

double eta0(const Vector& x, const Vector& z) {
  const Rank1Geometry geo = rank1_geometry(x, z);
  const double root = clamped_sqrt(1.0 - geo.alpha * geo.alpha);
  if (geo.beta >= geo.alpha / (1.0 + root)) {
    return (1.0 - root) / (1.0 + root);
  }
  return geo.beta * (geo.beta - geo.alpha) / (geo.beta * geo.alpha - 1.0);
}

double delta_lower_bound_rank1(const Vector& x, const Vector& z, double kappa) {
  const double tail = eta0(x, z) + 2.0 * (1.0 + kSqrt2) * kappa;
  return std::max((1.0 - tail) / (1.0 + tail), 0.0);
}

Thresholds thresholds(double kappa, double epsilon) {
  if (kappa < 0.0) {
    throw std::invalid_argument("thresholds: kappa must be nonnegative");
  }
  Thresholds th;
  th.epsilon_max = 2.0 * (kSqrt2 - 1.0);
  if (epsilon <= 0.0 || epsilon > th.epsilon_max + 1e-15) {
    throw std::domain_error(
        "thresholds: epsilon must lie in (0, 2(sqrt2 - 1)] for the local guarantee");
  }
  const double q = 6.0 * (1.0 + kSqrt2) * kappa;
  th.global_delta = std::max((2.0 - q) / (4.0 + q), 0.0);
  th.local_delta = clamped_sqrt(1.0 - (3.0 + 2.0 * kSqrt2) / 4.0 * epsilon * epsilon);
  return th;
}

DualCertificate dual_certificate_rank1(const Vector& x, const Vector& z, double kappa,
                                       double gamma) {
  const int n = static_cast<int>(x.size());
  const int nn = n * n;
  const Instance inst = build_instance(Matrix(x), Matrix(z), kappa);
  require_not_degenerate(inst);

  DualCertificate cert;
  if (x.norm() == 0.0) {
    // Separate closed-form point for the x = 0 landscape.
    cert.U1 = inst.e * inst.e.transpose() / (inst.e_norm * inst.e_norm);
    cert.U2 = Matrix::Zero(nn, nn);
    cert.V = z * z.transpose() / (2.0 * inst.e_norm * inst.e_norm);
    cert.G = Matrix::Zero(n, n);
    cert.lambda = 0.0;
    cert.y = Vector::Zero(n);
    cert.objective = inst.b * cert.V.trace();
    return cert;
  }

  const Rank1Geometry geo = rank1_geometry(x, z);
  if (gamma < 0.0 || gamma > geo.alpha + 1e-12) {
    throw std::domain_error("dual_certificate_rank1: gamma must lie in [0, alpha]");
  }
  gamma = std::min(gamma, geo.alpha);

  const Vector y = clamped_sqrt(1.0 - gamma * gamma) / inst.e_norm * geo.yhat;
  const Vector w_kron_w = vec(geo.w * geo.w.transpose());
  const Vector v = gamma / inst.e_norm * w_kron_w;
  const Matrix Vmat = gamma / inst.e_norm * geo.w * geo.w.transpose();

  const Vector dir = inst.Xop * y - v;
  const Matrix M = dir * inst.e.transpose() + inst.e * dir.transpose();
  const auto [mplus, mminus] = psd_split(M);
  const double tr_plus = mplus.trace();
  const double tr_minus = mminus.trace();

  cert.U1 = mplus / tr_plus;
  cert.U2 = mminus / tr_plus;
  cert.V = Vmat / tr_plus;
  cert.y = y / tr_plus;
  const double y_norm = cert.y.norm();
  if (inst.a > 0.0 && y_norm > 0.0) {
    cert.lambda = y_norm / inst.a;
    cert.G = cert.y * cert.y.transpose() / cert.lambda;
  } else {
    cert.lambda = 0.0;
    cert.G = Matrix::Zero(n, n);
  }
  const Matrix gram_op = inst.Xop.transpose() * inst.Xop +
                         inst.b * Matrix::Identity(n, n);
  cert.objective = (tr_minus + gram_op.cwiseProduct(Vmat).sum() +
                    2.0 * inst.a * y.norm()) /
                   tr_plus;
  return cert;
}

DualCertificate best_dual_certificate_rank1(const Vector& x, const Vector& z,
                                            double kappa) {
  if (x.norm() == 0.0) {
    return dual_certificate_rank1(x, z, kappa, 0.0);
  }
  const Rank1Geometry geo = rank1_geometry(x, z);
  const double alpha = geo.alpha;
  const double beta = geo.beta;

  // Stationary point of the kappa = 0 objective: at most one in (0, alpha).
  const auto slope = [&](double g) {
    const double root_g = clamped_sqrt(1.0 - g * g);
    const double dpsi = alpha - g * clamped_sqrt(1.0 - alpha * alpha) / std::max(root_g, 1e-300);
    return beta * (1.0 + certificate_cosine(g, alpha)) - dpsi * (1.0 + beta * g);
  };
  std::vector<double> grid;
  for (int i = 0; i <= 99; ++i) {
    grid.push_back(alpha * i / 99.0);
  }
  double lo = 0.0;
  double hi = alpha;
  if (slope(lo) < 0.0 && slope(hi) > 0.0) {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (slope(mid) < 0.0 ? lo : hi) = mid;
    }
    grid.push_back(0.5 * (lo + hi));
  }

  DualCertificate best;
  bool first = true;
  for (double g : grid) {
    DualCertificate cand = dual_certificate_rank1(x, z, kappa, g);
    if (first || cand.objective < best.objective) {
      best = std::move(cand);
      first = false;
    }
  }
  return best;
}

DualCertificate dual_certificate_local(const Matrix& X, const Matrix& Z) {
  const Instance inst = build_instance(X, Z, 0.0);
  require_not_degenerate(inst);
  const Matrix cross = X.transpose() * Z;
  const double scale = std::max(1.0, cross.norm());
  if ((cross - cross.transpose()).norm() > 1e-10 * scale ||
      eig_sym(0.5 * (cross + cross.transpose())).values.minCoeff() < -1e-10 * scale) {
    throw std::invalid_argument(
        "dual_certificate_local: X^T Z must be symmetric PSD (align_factors first)");
  }
  const double x_norm2 = X.squaredNorm();
  if (x_norm2 == 0.0) {
    throw std::domain_error("dual_certificate_local: X = 0 has no certificate direction");
  }
  const double c1 = X.cwiseProduct(Z).sum() / x_norm2;
  const Matrix residual = Z - c1 * X;
  const double c2 = residual.norm();
  const Matrix W = c2 > 0.0 ? Matrix(residual / c2) : Matrix(Matrix::Zero(X.rows(), X.cols()));
  const Matrix Y = 0.5 * (1.0 - c1 * c1) * X - c1 * c2 * W;
  const Vector y = Y.reshaped();

  const Vector xy = inst.Xop * y;
  const double xy_norm = xy.norm();
  if (xy_norm <= 1e-14 * std::max(1.0, inst.e_norm)) {
    throw std::domain_error("dual_certificate_local: Xop y vanished");
  }
  const Matrix M = xy * inst.e.transpose() + inst.e * xy.transpose();
  const auto [mplus, mminus] = psd_split(M);
  const double tr_plus = mplus.trace();

  DualCertificate cert;
  cert.U1 = mplus / tr_plus;
  cert.U2 = mminus / tr_plus;
  cert.V = Matrix::Zero(inst.n, inst.n);
  cert.G = Matrix::Zero(inst.n, inst.n);
  cert.lambda = 0.0;
  cert.y = y / tr_plus;
  const double cosang =
      std::clamp(inst.e.dot(xy) / (inst.e_norm * xy_norm), -1.0, 1.0);
  cert.objective = (1.0 - cosang) / (1.0 + cosang);
  return cert;
}

Matrix align_factors(const Matrix& X, const Matrix& Z) {
  if (X.rows() != Z.rows() || X.cols() != Z.cols()) {
    throw std::invalid_argument("align_factors: shape mismatch");
  }
  const SvdResult s = svd(X.transpose() * Z);
  return X * (s.U * s.V.transpose());
}

std::pair<double, double> error_ratio_check(const Matrix& X, const Matrix& Z) {
  const Matrix cross = X.transpose() * Z;
  const double scale = std::max(1.0, cross.norm());
  if ((cross - cross.transpose()).norm() > 1e-10 * scale ||
      eig_sym(0.5 * (cross + cross.transpose())).values.minCoeff() < -1e-10 * scale) {
    throw std::invalid_argument("error_ratio_check: X^T Z must be symmetric PSD");
  }
  const int r = static_cast<int>(Z.cols());
  const Matrix gram_z = Z * Z.transpose();
  const double lam_r = eig_sym(gram_z).values[r - 1];
  const double lhs = lam_r * (Z - X).squaredNorm();
  const double rhs =
      (gram_z - X * X.transpose()).squaredNorm() / (2.0 * (kSqrt2 - 1.0));
  return {lhs, rhs};
}

double rop_gap(const QuadraticForm& Q, const Matrix& K, const Matrix& L,
               int rank_budget) {
  const double nk = K.norm();
  const double nl = L.norm();
  if (nk == 0.0 || nl == 0.0) {
    throw std::invalid_argument("rop_gap: K and L must be nonzero");
  }
  for (const Matrix* A : {&K, &L}) {
    const Vector sv = svd(*A).singular_values;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
      if (sv[i] > 1e-10 * sv[0]) {
        ++rank;
      }
    }
    if (rank > rank_budget) {
      throw std::invalid_argument("rop_gap: argument exceeds the rank budget");
    }
  }
  return std::abs(Q(K, L) - K.cwiseProduct(L).sum()) / (nk * nl);
}

}  // namespace lrcert::certify
