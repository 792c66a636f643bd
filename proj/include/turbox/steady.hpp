#pragma once

#include "turbox/superop.hpp"

namespace turbox {

struct ThermalState {
  RVec populations;  // P_k
  double P = 0.0;    // P_0 + P_1 (virtual-qubit pair)
  double r0 = 0.0;   // P_0 - P_1
};

struct StrongCouplingState {
  RVec populations;
  double d = 0.0;    // twice the common virtual-qubit population
  double p_I = 0.0;
  bool carnot_degenerate = false;  // r0 ~ 0: p_I taken from the limit solve
};

struct DiagonalSteady {
  RVec q;
  double r = 0.0;     // q_0 - q_1
  double qsum = 0.0;  // q_0 + q_1
  double p_c = 0.0;
};

struct CoherentBlock {
  double x = 0.0;
  double y = 0.0;  // z = x - i y at (vq0, vq1)
};

struct XiOperator {
  RVec diag;
  double trace = 0.0;
};

struct SteadyReport {
  ThermalState tau;
  StrongCouplingState rho_I;
  double gamma = 0.0;
  DiagonalSteady diag;
  CoherentBlock coherence;
  XiOperator xi;
  bool xi_valid = false;
  bool carnot_degenerate = false;
};

/// Population-sector generator M: D(diag(v)) = diag(M v). Verifies on the way
/// that every dissipator maps diagonal states to diagonal states (part of the
/// coherence-confinement requirement on the jump operators).
inline RMat population_generator(const ModelSpec& m) {
  RMat M(m.dim, m.dim);
  for (int j = 0; j < m.dim; ++j) {
    Mat img = apply_all_dissipators(m, matrix_unit(m.dim, j, j));
    Mat offdiag = img;
    offdiag.diagonal().setZero();
    if (offdiag.cwiseAbs().maxCoeff() > kTolAbs)
      throw NotConfined("dissipators generate coherence from a diagonal state");
    if (img.diagonal().imag().cwiseAbs().maxCoeff() > kTolAbs)
      throw NotConfined("population generator is not real");
    M.col(j) = img.diagonal().real();
  }
  return M;
}

namespace detail {

struct NullVector {
  RVec v;
  double smallest = 0.0;
  double runner_up = 0.0;
};

/// Null vector of a singular generator by eigen-decomposition, picking the
/// eigenvalue of smallest magnitude and demanding a clear separation from the
/// runner-up.
inline NullVector null_vector(const RMat& M) {
  Eigen::EigenSolver<RMat> es(M);
  if (es.info() != Eigen::Success) throw NonUniqueNullSpace("eigen-decomposition failed");
  const auto& vals = es.eigenvalues();
  int i_min = 0, i_second = -1;
  for (int i = 1; i < vals.size(); ++i)
    if (std::abs(vals(i)) < std::abs(vals(i_min))) i_min = i;
  for (int i = 0; i < vals.size(); ++i) {
    if (i == i_min) continue;
    if (i_second < 0 || std::abs(vals(i)) < std::abs(vals(i_second))) i_second = i;
  }
  double s0 = std::abs(vals(i_min));
  double s1 = i_second >= 0 ? std::abs(vals(i_second)) : 0.0;
  double scale = vals.cwiseAbs().maxCoeff();
  if (s1 < std::max(1e3 * s0, 1e-10 * scale))
    throw NonUniqueNullSpace("null space of the population generator is not one-dimensional");
  Vec vc = es.eigenvectors().col(i_min);
  if (vc.imag().cwiseAbs().maxCoeff() > kTolAbs * vc.norm())
    throw NonUniqueNullSpace("null vector is not real");
  return {vc.real(), s0, s1};
}

/// Least-squares solve of the population generator stacked with a zero-sum
/// row: M w = rhs, sum(w) = 0. Unique when the generator has a simple kernel.
inline RVec traceless_population_solve(const RMat& M, const RVec& rhs, double* residual) {
  int d = static_cast<int>(M.rows());
  RMat A(d + 1, d);
  A.topRows(d) = M;
  A.row(d).setOnes();
  RVec b(d + 1);
  b.head(d) = rhs;
  b(d) = 0.0;
  RVec w = A.colPivHouseholderQr().solve(b);
  if (residual) *residual = (A * w - b).norm();
  return w;
}

}  // namespace detail

/// Detailed-balance state at g = 0: the unique probability vector annihilated
/// by the population generator.
inline ThermalState thermal_fixed_point(const ModelSpec& m) {
  require_structure(m);
  RMat M = population_generator(m);
  auto nv = detail::null_vector(M);
  RVec v = nv.v;
  double s = v.sum();
  if (std::abs(s) < 1e-12) throw NonUniqueNullSpace("null vector has zero total population");
  v /= s;
  if (v.minCoeff() < -kTolPsd)
    throw NonUniqueNullSpace("steady populations are not non-negative");
  ThermalState ts;
  ts.populations = v;
  ts.P = v(m.vq0) + v(m.vq1);
  ts.r0 = v(m.vq0) - v(m.vq1);
  return ts;
}

/// Strong-coupling population limit: solves the balance equations with the
/// constraint of equal virtual-qubit populations, plus the rate p_I. The rate
/// is extracted from the limit system M w = e_{vq0} - e_{vq1}, sum(w) = 0,
/// which stays well-posed at r0 = 0 where the naive ratio degenerates.
inline StrongCouplingState strong_coupling_state(const ModelSpec& m) {
  require_structure(m);
  RMat M = population_generator(m);
  ThermalState ts = thermal_fixed_point(m);
  const int d = m.dim;

  RVec u = RVec::Zero(d);
  u(m.vq0) = 1.0;
  u(m.vq1) = -1.0;
  double wres = 0.0;
  RVec w = detail::traceless_population_solve(M, u, &wres);
  if (wres > 1e-8)
    throw InvalidModel("strong-coupling limit system is inconsistent");
  double dw = w(m.vq0) - w(m.vq1);
  if (!(dw < 0))
    throw InvalidModel("strong-coupling relaxation rate is not positive");
  double p_I = -2.0 / dw;

  StrongCouplingState sc;
  sc.carnot_degenerate = std::abs(ts.r0) < 1e-9;
  sc.p_I = p_I;
  double s = 0.5 * p_I * ts.r0;  // coefficient of D(rho_I)
  sc.populations = ts.populations + s * w;
  sc.d = 2.0 * sc.populations(m.vq0);

  // Stacked system of the defining equations, as a consistency gate.
  RMat A(d + 2, d + 1);
  A.setZero();
  A.topLeftCorner(d, d) = M;
  A.topRightCorner(d, 1) = -u;
  A.row(d).head(d).setOnes();
  A(d + 1, m.vq0) = 1.0;
  A(d + 1, m.vq1) = -1.0;
  RVec b = RVec::Zero(d + 2);
  b(d) = 1.0;
  RVec full(d + 1);
  full.head(d) = sc.populations;
  full(d) = s;
  if ((A * full - b).norm() > 1e-8 * (1.0 + std::abs(s) + p_I))
    throw InvalidModel("strong-coupling state violates its defining equations");
  if (sc.populations.minCoeff() < -kTolPsd)
    throw InvalidModel("strong-coupling populations are not non-negative");
  return sc;
}

/// Steady state of the full generator by direct null-space extraction,
/// returned as a unit-trace Hermitian matrix. Reference route for
/// cross-checks of the structured solvers.
inline Mat liouvillian_steady_state(const ModelSpec& m) {
  Mat L = assemble_liouvillian(m);
  Eigen::ComplexEigenSolver<Mat> es(L);
  if (es.info() != Eigen::Success) throw NonUniqueNullSpace("Liouvillian eigensolve failed");
  const auto& vals = es.eigenvalues();
  int i_min = 0;
  for (int i = 1; i < vals.size(); ++i)
    if (std::abs(vals(i)) < std::abs(vals(i_min))) i_min = i;
  Mat rho = unvec(es.eigenvectors().col(i_min), m.dim);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  Complex tr = rho.trace();
  if (std::abs(tr) < 1e-12) throw NonUniqueNullSpace("null state has zero trace");
  rho /= tr;
  return rho;
}

struct SteadyOptions {
  bool cross_check = true;  // compare against the direct null-space solve
};

/// Effective coherent rate p_c = 4 g^2 gamma / (gamma^2 + Delta^2).
inline double coherent_rate(double g, double gamma, double delta) {
  return 4.0 * g * g * gamma / (gamma * gamma + delta * delta);
}

inline DiagonalSteady diagonal_steady_state(const ModelSpec& m, const ThermalState& ts,
                                            const StrongCouplingState& sc, double gamma,
                                            const SteadyOptions& opts = {}) {
  DiagonalSteady ds;
  ds.p_c = coherent_rate(m.g, gamma, m.detuning());
  double wI = ds.p_c / (sc.p_I + ds.p_c);
  ds.q = (1.0 - wI) * ts.populations + wI * sc.populations;
  ds.r = ds.q(m.vq0) - ds.q(m.vq1);
  ds.qsum = ds.q(m.vq0) + ds.q(m.vq1);
  if (opts.cross_check) {
    Mat rho = liouvillian_steady_state(m);
    RVec qd = rho.diagonal().real();
    if ((qd - ds.q).cwiseAbs().maxCoeff() > kTolRel * (1.0 + ds.q.cwiseAbs().maxCoeff()))
      throw CrossCheckFailure("convex-combination steady state disagrees with null-space solve");
  }
  return ds;
}

/// Virtual-qubit coherence of the steady state, z = x - i y.
inline CoherentBlock coherent_block(const ModelSpec& m, const DiagonalSteady& ds, double gamma) {
  double delta = m.detuning();
  double denom = delta * delta + gamma * gamma;
  CoherentBlock cb;
  cb.x = m.g * delta * ds.r / denom;
  cb.y = -m.g * gamma * ds.r / denom;
  return cb;
}

/// rho_s = rho_d + rho_c as a dense matrix.
inline Mat steady_density(const ModelSpec& m, const DiagonalSteady& ds, const CoherentBlock& cb) {
  Mat rho = Mat::Zero(m.dim, m.dim);
  rho.diagonal() = ds.q.cast<Complex>();
  Complex z(cb.x, -cb.y);
  rho(m.vq0, m.vq1) = z;
  rho(m.vq1, m.vq0) = std::conj(z);
  return rho;
}

/// Diagonal operator xi_d solving D(xi) = rho_d - (q_0 |1><1| - q_1 |0><0|)/r
/// under the gauge xi_0 = xi_1. The gauge row restores full rank as long as
/// the thermal imbalance r0 is nonzero.
inline XiOperator solve_xi(const ModelSpec& m, const DiagonalSteady& ds) {
  if (ds.r == 0.0) throw SingularGauge("population imbalance r vanishes");
  require_structure(m);
  RMat M = population_generator(m);
  const int d = m.dim;
  RVec rhs = ds.q;
  rhs(m.vq0) += ds.q(m.vq1) / ds.r;
  rhs(m.vq1) -= ds.q(m.vq0) / ds.r;

  RMat A(d + 1, d);
  A.topRows(d) = M;
  A.row(d).setZero();
  A(d, m.vq0) = 1.0;
  A(d, m.vq1) = -1.0;
  RVec b(d + 1);
  b.head(d) = rhs;
  b(d) = 0.0;
  auto qr = A.colPivHouseholderQr();
  // The gauge row restores full rank only when the thermal state splits the
  // virtual-qubit populations; otherwise the tau direction stays free.
  if (qr.rank() < d)
    throw SingularGauge("gauge row fails to fix the tau component (r0 = 0)");
  RVec xi = qr.solve(b);
  double res = (A * xi - b).norm();
  if (res > kTolAbs * (1.0 + b.norm()))
    throw SingularGauge("gauge-constrained xi solve left residual " + std::to_string(res));
  XiOperator out;
  out.diag = xi;
  out.trace = xi.sum();
  return out;
}

/// Full steady-state pipeline: tau, rho_I, rho_d, the coherent block, and
/// xi_d when the gauge admits it.
inline SteadyReport solve_steady(const ModelSpec& m, const SteadyOptions& opts = {}) {
  SteadyReport rep;
  rep.gamma = decoherence_rate(m);
  rep.tau = thermal_fixed_point(m);
  rep.rho_I = strong_coupling_state(m);
  rep.carnot_degenerate = rep.rho_I.carnot_degenerate;
  rep.diag = diagonal_steady_state(m, rep.tau, rep.rho_I, rep.gamma, opts);
  rep.coherence = coherent_block(m, rep.diag, rep.gamma);
  if (!rep.carnot_degenerate && rep.diag.r != 0.0) {
    rep.xi = solve_xi(m, rep.diag);
    rep.xi_valid = true;
  }
  return rep;
}

}  // namespace turbox
