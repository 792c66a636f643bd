#pragma once

#include "turbox/validate.hpp"

namespace turbox {

using LabeledRates = std::vector<std::pair<std::string, double>>;

struct TurReport {
  double J_c = 0.0;
  LabeledRates J;      // photon current per reservoir
  double sigma = 0.0;
  LabeledRates var_d;  // diagonal variance contribution per reservoir
  LabeledRates var_c;  // coherent variance contribution per reservoir
  double Q_d = 0.0;
  double Q_c = 0.0;
  double Q = 0.0;
};

struct Currents {
  double J_c = 0.0;
  LabeledRates J;
};

/// Steady-state photon currents: J_c = p_c r / 2 through the coherent channel
/// and J_i = -n_i J_c into each reservoir, cross-checked against the direct
/// trace formula on rho_d.
inline Currents currents(const ModelSpec& m, const SteadyReport& sr) {
  Currents out;
  out.J_c = 0.5 * sr.diag.p_c * sr.diag.r;
  std::vector<int> counts = resolved_photon_counts(m);
  Mat rho_d = Mat::Zero(m.dim, m.dim);
  rho_d.diagonal() = sr.diag.q.cast<Complex>();
  double scale = std::max(1.0, std::abs(out.J_c));
  for (std::size_t i = 0; i < m.reservoirs.size(); ++i) {
    const auto& res = m.reservoirs[i];
    int n = counts[i];
    double val = -n * out.J_c;
    int s = reservoir_orientation(m, res);
    double traced = s * detail::jump_current(res, rho_d);
    if (std::abs(val - traced) > kTolRel * scale)
      throw CrossCheckFailure("current formulas disagree for reservoir '" + res.label + "'");
    out.J.push_back({res.label, val});
  }
  return out;
}

/// sigma = J_c ln(P0/P1), cross-checked against the per-reservoir sum
/// of jump currents weighted by ln(Rbar/R).
inline double entropy_production(const ModelSpec& m, const SteadyReport& sr) {
  double sigma = 0.0;
  if (sr.diag.p_c != 0.0 && sr.tau.r0 != 0.0) {
    double J_c = 0.5 * sr.diag.p_c * sr.diag.r;
    sigma = J_c * std::log(sr.tau.populations(m.vq0) / sr.tau.populations(m.vq1));
  }
  Mat rho_d = Mat::Zero(m.dim, m.dim);
  rho_d.diagonal() = sr.diag.q.cast<Complex>();
  double cross = 0.0;
  for (const auto& res : m.reservoirs)
    cross += detail::jump_current(res, rho_d) * std::log(res.Rbar() / res.R);
  if (std::abs(sigma - cross) > kTolRel * std::max(1.0, std::abs(sigma)))
    throw CrossCheckFailure("entropy-production formulas disagree");
  if (sigma < -kTolAbs) throw CrossCheckFailure("entropy production is negative");
  return sigma;
}

struct VarianceParts {
  LabeledRates var_d;
  LabeledRates var_c;
};

/// Split of the long-time current variance per reservoir. The diagonal part
/// is the classical-counterpart variance scaled by n_i^2; the coherent part
/// carries the (gamma^2 - Delta^2) sign structure.
inline VarianceParts variance_decomposition(const ModelSpec& m, const SteadyReport& sr) {
  if (!sr.xi_valid) {
    if (sr.carnot_degenerate) throw SingularGauge("xi_d is gauge-singular at r0 = 0");
    VarianceParts vp;  // g = 0: all currents and both contributions vanish
    for (const auto& res : m.reservoirs) {
      vp.var_d.push_back({res.label, 0.0});
      vp.var_c.push_back({res.label, 0.0});
    }
    return vp;
  }
  std::vector<int> counts = resolved_photon_counts(m);
  double J_c = 0.5 * sr.diag.p_c * sr.diag.r;
  double delta = m.detuning();
  double g2 = sr.gamma * sr.gamma;
  double coh_factor = (g2 - delta * delta) / (g2 + delta * delta);
  VarianceParts vp;
  for (std::size_t i = 0; i < m.reservoirs.size(); ++i) {
    const auto& res = m.reservoirs[i];
    int n = counts[i];
    double Ji2 = double(n) * n * J_c * J_c;
    double vd = 0.5 * sr.diag.p_c * sr.diag.qsum * n * n - 2.0 * Ji2 * sr.xi.trace;
    double vc = -2.0 / sr.gamma * coh_factor * (sr.diag.r / sr.tau.r0) * Ji2;
    vp.var_d.push_back({res.label, vd});
    vp.var_c.push_back({res.label, vc});
  }
  return vp;
}

/// Thermodynamic uncertainty Q = sigma Var(J)/J^2, split into the diagonal
/// (classical) part and the coherent part. Identical for every reservoir with
/// n != 0; both parts are assembled from the c-channel quantities.
inline TurReport uncertainty(const ModelSpec& m, const SteadyReport& sr) {
  if (sr.carnot_degenerate)
    throw CarnotLimit("r0 = 0: use the near-Carnot expansion instead of Q");
  if (!(m.g > 0) || sr.diag.p_c == 0.0)
    throw InvalidModel("uncertainty needs a nonzero coherent coupling");
  TurReport rep;
  Currents cur = currents(m, sr);
  rep.J_c = cur.J_c;
  rep.J = cur.J;
  rep.sigma = entropy_production(m, sr);
  auto vp = variance_decomposition(m, sr);
  rep.var_d = vp.var_d;
  rep.var_c = vp.var_c;

  double lnratio = std::log(sr.tau.populations(m.vq0) / sr.tau.populations(m.vq1));
  double delta = m.detuning();
  double g2 = sr.gamma * sr.gamma;
  rep.Q_d = lnratio * (sr.diag.qsum / sr.diag.r - sr.diag.p_c * sr.diag.r * sr.xi.trace);
  rep.Q_c = -lnratio * (sr.diag.p_c * sr.diag.r * sr.diag.r / (sr.tau.r0 * sr.gamma)) *
            (g2 - delta * delta) / (g2 + delta * delta);
  rep.Q = rep.Q_d + rep.Q_c;
  return rep;
}

/// g = 0 model with the coherent coupling replaced by an infinite-temperature
/// channel of strength p_c on the virtual qubit. Its steady state is rho_d and
/// it reproduces every J_i; its uncertainty equals Q_d.
inline ModelSpec classical_counterpart(const ModelSpec& m) {
  double gamma = decoherence_rate(m);
  double p_c = coherent_rate(m.g, gamma, m.detuning());
  if (!(p_c > 0)) throw InvalidModel("classical counterpart needs g > 0");
  std::vector<int> counts = resolved_photon_counts(m);

  ModelSpec cp = m;
  cp.g = 0.0;
  for (std::size_t i = 0; i < cp.reservoirs.size(); ++i)
    cp.reservoirs[i].n = counts[i];

  Reservoir dc;
  dc.label = "classical";
  dc.p = p_c;
  dc.R = 0.5;
  dc.gamma = matrix_unit(m.dim, m.vq1, m.vq0);
  dc.n = -1;  // sign convention: the reported current of this channel is J_c
  cp.reservoirs.push_back(dc);
  return cp;
}

}  // namespace turbox
