#include "lrcert/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lrcert::sdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-block working data: flattened coefficient triplets plus an optional
// dense layout for blocks whose coefficients are not sparse.
struct BlockData {
  int dim = 0;
  std::vector<int> vars;       // active variable indices
  std::vector<int> offsets;    // triplet range per active var, size vars+1
  std::vector<SymTriplet> trips;
  bool dense_path = false;
  Matrix dense_coeffs;         // dim^2 x nactive, col a = vec(F_{vars[a]})
};

double sym_dot(const BlockData& bd, int a, const Matrix& W) {
  double acc = 0.0;
  for (int t = bd.offsets[a]; t < bd.offsets[a + 1]; ++t) {
    const SymTriplet& e = bd.trips[t];
    acc += e.value * (e.row == e.col ? W(e.row, e.col) : W(e.row, e.col) + W(e.col, e.row));
  }
  return acc;
}

// G = Wl * F_a * Wr for symmetric Wl, Wr, exploiting the triplet form.
void sandwich(const BlockData& bd, int a, const Matrix& Wl, const Matrix& Wr, Matrix& G) {
  G.setZero();
  for (int t = bd.offsets[a]; t < bd.offsets[a + 1]; ++t) {
    const SymTriplet& e = bd.trips[t];
    G.noalias() += e.value * Wl.col(e.row) * Wr.col(e.col).transpose();
    if (e.row != e.col) {
      G.noalias() += e.value * Wl.col(e.col) * Wr.col(e.row).transpose();
    }
  }
}

void scatter_add(const BlockData& bd, int a, double scale, Matrix& Z) {
  for (int t = bd.offsets[a]; t < bd.offsets[a + 1]; ++t) {
    const SymTriplet& e = bd.trips[t];
    Z(e.row, e.col) += scale * e.value;
    if (e.row != e.col) {
      Z(e.col, e.row) += scale * e.value;
    }
  }
}

Matrix dense_coeff(const BlockData& bd, int a) {
  Matrix F = Matrix::Zero(bd.dim, bd.dim);
  scatter_add(bd, a, 1.0, F);
  return F;
}

// Largest alpha in [0, cap] with P + alpha * dP >= 0, given the Cholesky
// factor of P.
double max_step(const Eigen::LLT<Matrix>& llt, const Matrix& dP, double cap) {
  const Matrix& L = llt.matrixL();
  Matrix W = L.triangularView<Eigen::Lower>().solve(dP);
  W = L.triangularView<Eigen::Lower>().solve(W.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (W + W.transpose()),
                                           Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) {
    return cap;
  }
  return std::min(cap, -1.0 / lmin);
}

// Row-echelon reduction of the equality system Q y = d with partial pivoting.
// Dependent rows are dropped; returns false when the system is inconsistent.
bool reduce_equalities(Matrix& Q, Vector& d) {
  const Eigen::Index p = Q.rows();
  const Eigen::Index m = Q.cols();
  if (p == 0) {
    return true;
  }
  const double scale = std::max({1.0, Q.cwiseAbs().maxCoeff(), d.cwiseAbs().maxCoeff()});
  const double tol = 1e-12 * scale;
  Eigen::Index rank = 0;
  for (Eigen::Index col = 0; col < m && rank < p; ++col) {
    Eigen::Index piv = rank;
    double best = std::abs(Q(rank, col));
    for (Eigen::Index i = rank + 1; i < p; ++i) {
      if (std::abs(Q(i, col)) > best) {
        best = std::abs(Q(i, col));
        piv = i;
      }
    }
    if (best <= tol) {
      continue;
    }
    Q.row(rank).swap(Q.row(piv));
    std::swap(d[rank], d[piv]);
    for (Eigen::Index i = rank + 1; i < p; ++i) {
      const double f = Q(i, col) / Q(rank, col);
      if (f != 0.0) {
        Q.row(i) -= f * Q.row(rank);
        d[i] -= f * d[rank];
      }
    }
    ++rank;
  }
  // Rows below `rank` have only sub-tolerance coefficients left.
  for (Eigen::Index i = rank; i < p; ++i) {
    if (std::abs(d[i]) > 1e-9 * scale) {
      return false;
    }
  }
  Q.conservativeResize(rank, m);
  d.conservativeResize(rank);
  return true;
}

void validate(const SdpProblem& p) {
  if (p.nvars < 1) {
    throw std::invalid_argument("sdp: nvars must be >= 1");
  }
  if (p.objective.size() != p.nvars) {
    throw std::invalid_argument("sdp: objective size does not match nvars");
  }
  if (p.blocks.empty()) {
    throw std::invalid_argument("sdp: at least one block is required");
  }
  for (const AffineBlock& b : p.blocks) {
    if (b.dim < 1 || b.constant.rows() != b.dim || b.constant.cols() != b.dim) {
      throw std::invalid_argument("sdp: block constant has wrong shape");
    }
    if (static_cast<int>(b.coeffs.size()) != p.nvars) {
      throw std::invalid_argument("sdp: block coeffs size does not match nvars");
    }
    for (const auto& list : b.coeffs) {
      for (const SymTriplet& t : list) {
        if (t.row < 0 || t.col < t.row || t.col >= b.dim) {
          throw std::invalid_argument("sdp: coefficient triplet out of range");
        }
      }
    }
  }
  if (p.eq_coeffs.rows() > 0 && p.eq_coeffs.cols() != p.nvars) {
    throw std::invalid_argument("sdp: equality coefficients have wrong shape");
  }
  if (p.eq_coeffs.rows() != p.eq_rhs.size()) {
    throw std::invalid_argument("sdp: equality rhs size mismatch");
  }
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kMaxIter:
      return "max-iter";
  }
  return "unknown";
}

Matrix block_value(const AffineBlock& b, const Vector& y) {
  Matrix V = b.constant;
  for (int i = 0; i < static_cast<int>(b.coeffs.size()); ++i) {
    for (const SymTriplet& t : b.coeffs[i]) {
      V(t.row, t.col) += y[i] * t.value;
      if (t.row != t.col) {
        V(t.col, t.row) += y[i] * t.value;
      }
    }
  }
  return V;
}

void add_coeff(AffineBlock& b, int var, int row, int col, double value) {
  if (value == 0.0) {
    return;
  }
  if (row > col) {
    std::swap(row, col);
  }
  b.coeffs[var].push_back(SymTriplet{row, col, value});
}

void set_coeff_dense(AffineBlock& b, int var, const Matrix& C) {
  b.coeffs[var].clear();
  for (int r = 0; r < b.dim; ++r) {
    for (int c = r; c < b.dim; ++c) {
      const double v = r == c ? C(r, c) : 0.5 * (C(r, c) + C(c, r));
      if (v != 0.0) {
        b.coeffs[var].push_back(SymTriplet{r, c, v});
      }
    }
  }
}

SdpSolution solve(const SdpProblem& prob, const SolverOptions& opts) {
  validate(prob);
  const int m = prob.nvars;
  const int nblocks = static_cast<int>(prob.blocks.size());
  const Vector& c = prob.objective;

  // Equality preprocessing: drop dependent/zero rows, detect inconsistency.
  Matrix Q = prob.eq_coeffs;
  Vector q0 = prob.eq_rhs;
  {
    Vector d = -q0;
    if (!reduce_equalities(Q, d)) {
      SdpSolution bad;
      bad.status = SolveStatus::kInfeasible;
      bad.diagnostics = "inconsistent equality rows (0 = nonzero after elimination)";
      bad.primal = Vector::Zero(m);
      return bad;
    }
    q0 = -d;
  }
  const int p = static_cast<int>(Q.rows());

  // Flatten block coefficients.
  std::vector<BlockData> bds(nblocks);
  double data_norm = 1.0;
  int ntotal = 0;
  for (int k = 0; k < nblocks; ++k) {
    const AffineBlock& b = prob.blocks[k];
    BlockData& bd = bds[k];
    bd.dim = b.dim;
    ntotal += b.dim;
    bd.offsets.push_back(0);
    for (int i = 0; i < m; ++i) {
      if (!b.coeffs[i].empty()) {
        bd.vars.push_back(i);
        bd.trips.insert(bd.trips.end(), b.coeffs[i].begin(), b.coeffs[i].end());
        bd.offsets.push_back(static_cast<int>(bd.trips.size()));
      }
    }
    bd.dense_path = bd.trips.size() > 8 * bd.vars.size() && bd.dim <= 64;
    if (bd.dense_path) {
      bd.dense_coeffs.resize(bd.dim * bd.dim, static_cast<int>(bd.vars.size()));
      for (int a = 0; a < static_cast<int>(bd.vars.size()); ++a) {
        bd.dense_coeffs.col(a) = dense_coeff(bd, a).reshaped();
      }
    }
    data_norm = std::max(data_norm, b.constant.norm());
  }

  // Identity-scaled central starting point.
  const double s0 = opts.init_scale > 0.0 ? opts.init_scale
                                          : std::max(10.0, 2.0 * data_norm);
  Vector y = Vector::Zero(m);
  Vector nu = Vector::Zero(p);
  std::vector<Matrix> X(nblocks), Z(nblocks);
  for (int k = 0; k < nblocks; ++k) {
    X[k] = s0 * Matrix::Identity(bds[k].dim, bds[k].dim);
    Z[k] = s0 * Matrix::Identity(bds[k].dim, bds[k].dim);
  }

  SdpSolution sol;
  sol.primal = y;
  sol.eq_duals = nu;

  std::vector<Matrix> Rp(nblocks), Zinv(nblocks), E(nblocks);
  std::vector<Matrix> dZ(nblocks), dX(nblocks), dZaff(nblocks), dXaff(nblocks);
  std::vector<Eigen::LLT<Matrix>> lltZ(nblocks), lltX(nblocks);
  Matrix M(m, m);
  Matrix G;
  int stall_count = 0;

  const auto record = [&](SolveStatus status, const std::string& note) {
    sol.status = status;
    sol.objective_value = c.dot(y);
    sol.primal = y;
    sol.block_duals = X;
    sol.eq_duals = nu;
    double dobj = q0.dot(nu);
    for (int k = 0; k < nblocks; ++k) {
      dobj -= prob.blocks[k].constant.cwiseProduct(X[k]).sum();
    }
    sol.duality_gap = std::abs(sol.objective_value - dobj);
    if (!note.empty()) {
      sol.diagnostics = note;
    }
  };

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    // Residuals and merit quantities.
    double pres = 0.0;
    double trXZ = 0.0;
    Vector rd = c;  // c - A(X) + Q^T nu
    for (int k = 0; k < nblocks; ++k) {
      Rp[k] = block_value(prob.blocks[k], y) - Z[k];
      pres = std::max(pres, Rp[k].norm());
      trXZ += X[k].cwiseProduct(Z[k]).sum();
      const BlockData& bd = bds[k];
      for (int a = 0; a < static_cast<int>(bd.vars.size()); ++a) {
        rd[bd.vars[a]] -= sym_dot(bd, a, X[k]);
      }
    }
    if (p > 0) {
      rd.noalias() += Q.transpose() * nu;
    }
    const Vector re = p > 0 ? Vector(-(Q * y + q0)) : Vector();
    const double eqres = p > 0 ? (Q * y + q0).cwiseAbs().maxCoeff() : 0.0;
    const double dres = rd.cwiseAbs().maxCoeff() / (1.0 + c.cwiseAbs().maxCoeff());
    const double mu = trXZ / ntotal;

    const double pobj = c.dot(y);
    double dobj = q0.dot(nu);
    for (int k = 0; k < nblocks; ++k) {
      dobj -= prob.blocks[k].constant.cwiseProduct(X[k]).sum();
    }
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

    sol.history.push_back(IterationInfo{iter, mu, pobj, dobj, pres, dres, eqres});
    sol.iterations = iter;
    if (opts.verbose) {
      std::ostringstream line;
      line << "iter " << iter << " mu=" << mu << " gap=" << relgap << " pres=" << pres
           << " dres=" << dres << " eqres=" << eqres;
      sol.diagnostics += line.str() + "\n";
    }

    if (pres <= opts.feas_tol && eqres <= opts.feas_tol && dres <= opts.feas_tol &&
        relgap <= opts.gap_tol) {
      record(SolveStatus::kOptimal, "");
      return sol;
    }

    // Divergence heuristics (the certification programs are strictly feasible,
    // so these paths flag malformed user input).
    double xnorm = 0.0;
    for (int k = 0; k < nblocks; ++k) {
      xnorm = std::max(xnorm, X[k].norm());
    }
    if (pobj < -1e10 && pres <= 1e-4 * (1.0 + data_norm)) {
      record(SolveStatus::kUnbounded,
             "objective diverges along a feasible direction (pobj < -1e10)");
      return sol;
    }
    if (xnorm > 1e13 || mu > 1e14) {
      record(SolveStatus::kInfeasible,
             "dual multipliers diverge; no strictly feasible point was approached");
      return sol;
    }

    // Factor Z and form the Schur complement M_ij = sum_k <F_i, Z^-1 F_j X>.
    bool factor_ok = true;
    for (int k = 0; k < nblocks; ++k) {
      lltZ[k].compute(Z[k]);
      if (lltZ[k].info() != Eigen::Success) {
        factor_ok = false;
        break;
      }
      Zinv[k] = lltZ[k].solve(Matrix::Identity(bds[k].dim, bds[k].dim));
      lltX[k].compute(X[k]);
      if (lltX[k].info() != Eigen::Success) {
        factor_ok = false;
        break;
      }
    }
    if (!factor_ok) {
      record(SolveStatus::kMaxIter, "iterate left the cone (Cholesky of X or Z failed)");
      return sol;
    }

    M.setZero();
    for (int k = 0; k < nblocks; ++k) {
      const BlockData& bd = bds[k];
      const int na = static_cast<int>(bd.vars.size());
      if (na == 0) {
        continue;
      }
      if (bd.dense_path) {
        Matrix Gmat(bd.dim * bd.dim, na);
        Matrix F(bd.dim, bd.dim), GF(bd.dim, bd.dim);
        for (int a = 0; a < na; ++a) {
          F = bd.dense_coeffs.col(a).reshaped(bd.dim, bd.dim);
          GF.noalias() = Zinv[k] * F * X[k];
          Gmat.col(a) = GF.reshaped();
        }
        Matrix Mloc = bd.dense_coeffs.transpose() * Gmat;
        Mloc = 0.5 * (Mloc + Mloc.transpose()).eval();
        for (int a = 0; a < na; ++a) {
          for (int b = 0; b < na; ++b) {
            M(bd.vars[a], bd.vars[b]) += Mloc(a, b);
          }
        }
      } else {
        G.resize(bd.dim, bd.dim);
        for (int a = 0; a < na; ++a) {
          sandwich(bd, a, Zinv[k], X[k], G);
          for (int b = a; b < na; ++b) {
            const double v = sym_dot(bd, b, G);
            M(bd.vars[a], bd.vars[b]) += v;
            if (a != b) {
              M(bd.vars[b], bd.vars[a]) += v;
            }
          }
        }
      }
    }

    Eigen::LLT<Matrix> lltM(M);
    if (lltM.info() != Eigen::Success) {
      double ridge = 1e-12 * std::max(1.0, M.trace() / m);
      for (int tries = 0; tries < 4 && lltM.info() != Eigen::Success; ++tries) {
        lltM.compute(M + ridge * Matrix::Identity(m, m));
        ridge *= 100.0;
      }
      if (lltM.info() != Eigen::Success) {
        record(SolveStatus::kMaxIter, "Schur complement not positive definite");
        return sol;
      }
    }
    Matrix MinvQt;
    Eigen::LLT<Matrix> lltS;
    if (p > 0) {
      MinvQt = lltM.solve(Q.transpose());
      Matrix S = Q * MinvQt;
      lltS.compute(0.5 * (S + S.transpose()));
      if (lltS.info() != Eigen::Success) {
        record(SolveStatus::kMaxIter, "equality Schur system not positive definite");
        return sol;
      }
    }

    // One Newton solve for a given target sigma*mu and corrector term.
    const auto newton = [&](double sigma_mu, const std::vector<Matrix>* corr,
                            Vector& dy, Vector& dnu, std::vector<Matrix>& dZout,
                            std::vector<Matrix>& dXout) {
      Vector u = -rd;
      for (int k = 0; k < nblocks; ++k) {
        E[k].noalias() = -Zinv[k] * (Rp[k] * X[k]);
        E[k] -= X[k];
        if (sigma_mu > 0.0) {
          E[k] += sigma_mu * Zinv[k];
        }
        if (corr != nullptr) {
          E[k].noalias() -= Zinv[k] * (*corr)[k];
        }
        const BlockData& bd = bds[k];
        for (int a = 0; a < static_cast<int>(bd.vars.size()); ++a) {
          u[bd.vars[a]] += sym_dot(bd, a, E[k]);
        }
      }
      if (p > 0) {
        const Vector w = lltM.solve(u);
        dnu = lltS.solve(Q * w - re);
        dy = lltM.solve(u - Q.transpose() * dnu);
      } else {
        dy = lltM.solve(u);
      }
      for (int k = 0; k < nblocks; ++k) {
        // Variable part of dZ; E already carries the Z^-1 Rp X term.
        Matrix dZvar = Matrix::Zero(bds[k].dim, bds[k].dim);
        const BlockData& bd = bds[k];
        for (int a = 0; a < static_cast<int>(bd.vars.size()); ++a) {
          scatter_add(bd, a, dy[bd.vars[a]], dZvar);
        }
        dXout[k].noalias() = -Zinv[k] * (dZvar * X[k]);
        dXout[k] += E[k];
        dXout[k] = 0.5 * (dXout[k] + dXout[k].transpose()).eval();
        dZout[k] = dZvar + Rp[k];
      }
    };

    // Predictor.
    Vector dy(m), dnu(p);
    newton(0.0, nullptr, dy, dnu, dZaff, dXaff);
    double ax = 1.0, az = 1.0;
    for (int k = 0; k < nblocks; ++k) {
      ax = std::min(ax, max_step(lltX[k], dXaff[k], 1.0));
      az = std::min(az, max_step(lltZ[k], dZaff[k], 1.0));
    }
    double tr_aff = 0.0;
    for (int k = 0; k < nblocks; ++k) {
      tr_aff += (X[k] + ax * dXaff[k]).cwiseProduct(Z[k] + az * dZaff[k]).sum();
    }
    const double mu_aff = std::max(tr_aff / ntotal, 0.0);
    double sigma = std::pow(mu_aff / mu, 3);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    std::vector<Matrix> corr(nblocks);
    for (int k = 0; k < nblocks; ++k) {
      corr[k].noalias() = dZaff[k] * dXaff[k];
    }
    newton(sigma * mu, &corr, dy, dnu, dZ, dX);

    ax = opts.step_fraction;
    az = opts.step_fraction;
    for (int k = 0; k < nblocks; ++k) {
      ax = std::min(ax, opts.step_fraction * max_step(lltX[k], dX[k], kInf));
      az = std::min(az, opts.step_fraction * max_step(lltZ[k], dZ[k], kInf));
    }
    ax = std::min(ax, 1.0);
    az = std::min(az, 1.0);

    // Keep the iterates factorable; back off on rounding-induced escapes.
    for (int guard = 0; guard < 8; ++guard) {
      bool ok = true;
      for (int k = 0; k < nblocks && ok; ++k) {
        ok = Eigen::LLT<Matrix>(Matrix(X[k] + ax * dX[k])).info() == Eigen::Success &&
             Eigen::LLT<Matrix>(Matrix(Z[k] + az * dZ[k])).info() == Eigen::Success;
      }
      if (ok) {
        break;
      }
      ax *= 0.8;
      az *= 0.8;
    }

    for (int k = 0; k < nblocks; ++k) {
      X[k] += ax * dX[k];
      Z[k] += az * dZ[k];
    }
    y += az * dy;
    if (p > 0) {
      nu += az * dnu;
    }

    if (std::max(ax, az) < 1e-4) {
      if (++stall_count >= 5) {
        record(SolveStatus::kMaxIter, "step lengths collapsed (stalled)");
        return sol;
      }
    } else {
      stall_count = 0;
    }
  }

  record(SolveStatus::kMaxIter, "iteration limit reached");
  return sol;
}

FeasibilityReport verify(const SdpProblem& p, const SdpSolution& s) {
  FeasibilityReport rep;
  for (const AffineBlock& b : p.blocks) {
    const Matrix V = block_value(b, s.primal);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (V + V.transpose()),
                                             Eigen::EigenvaluesOnly);
    rep.block_min_eigenvalues.push_back(es.eigenvalues().minCoeff());
  }
  Vector rd = p.objective;
  for (std::size_t k = 0; k < s.block_duals.size() && k < p.blocks.size(); ++k) {
    const Matrix& Xk = s.block_duals[k];
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (Xk + Xk.transpose()),
                                             Eigen::EigenvaluesOnly);
    rep.dual_min_eigenvalues.push_back(es.eigenvalues().minCoeff());
    const AffineBlock& b = p.blocks[k];
    for (int i = 0; i < p.nvars; ++i) {
      for (const SymTriplet& t : b.coeffs[i]) {
        rd[i] -= t.value * (t.row == t.col ? Xk(t.row, t.col)
                                           : Xk(t.row, t.col) + Xk(t.col, t.row));
      }
    }
  }
  double dobj = 0.0;
  if (p.eq_coeffs.rows() > 0) {
    rep.eq_residual_inf = (p.eq_coeffs * s.primal + p.eq_rhs).cwiseAbs().maxCoeff();
    // eq_duals live on the reduced row set; the stationarity term is exact
    // only when no rows were dropped.
    if (s.eq_duals.size() == p.eq_coeffs.rows()) {
      rd.noalias() += p.eq_coeffs.transpose() * s.eq_duals;
      dobj += p.eq_rhs.dot(s.eq_duals);
    }
  }
  rep.dual_residual_inf = rd.cwiseAbs().maxCoeff();
  for (std::size_t k = 0; k < s.block_duals.size() && k < p.blocks.size(); ++k) {
    dobj -= p.blocks[k].constant.cwiseProduct(s.block_duals[k]).sum();
  }
  rep.recomputed_gap = std::abs(p.objective.dot(s.primal) - dobj);
  return rep;
}

}  // namespace lrcert::sdp
