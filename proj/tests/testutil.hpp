#pragma once

#include <map>
#include <string>
#include <vector>

#include "turbox/turbox.hpp"

namespace tu {

using namespace turbox;

// Deterministic random machines for the property batches. Draws stay away
// from the reversible limit and from vanishing currents so that relative
// comparisons against the counting-field oracle are meaningful.
inline ModelSpec sample_model(int family_idx, Rng& rng, std::string* fam_name = nullptr) {
  for (;;) {
    try {
      ModelSpec m;
      std::string name;
      switch (family_idx % 4) {
        case 0: {
          name = "qubit";
          double R = rng.uniform(0.08, 0.92);
          double delta = rng.uniform(0.0, 1.0) < 0.5 ? 0.0 : rng.uniform(-0.4, 0.4);
          m = zoo::driven_qubit(rng.uniform(0.5, 1.5), R, 0.0, delta);
          break;
        }
        case 1: {
          name = "two-qubit";
          m = zoo::two_qubit_transport(rng.uniform(0.4, 1.5), rng.uniform(0.4, 1.5),
                                       rng.uniform(0.08, 0.92), rng.uniform(0.08, 0.92), 0.0);
          break;
        }
        case 2: {
          name = "qutrit";
          std::array<double, 3> E{rng.uniform(0.8, 1.8), rng.uniform(0.2, 0.7), 0.0};
          double wd = E[0] - E[1];
          if (rng.uniform(0.0, 1.0) > 0.5) wd -= rng.uniform(-0.3, 0.3);
          m = zoo::driven_qutrit(E, rng.uniform(0.4, 1.5), rng.uniform(0.4, 1.5),
                                 rng.uniform(0.08, 0.92), rng.uniform(0.08, 0.92), 0.0, wd);
          break;
        }
        default: {
          name = "fridge";
          double w3 = rng.uniform(0.4, 1.2);
          m = zoo::three_qubit_fridge(
              {1.0, 1.0 + w3, w3},
              {rng.uniform(0.4, 1.4), rng.uniform(0.4, 1.4), rng.uniform(0.4, 1.4)},
              {rng.uniform(0.15, 0.85), rng.uniform(0.15, 0.85), rng.uniform(0.15, 0.85)}, 0.0);
          break;
        }
      }
      double x = rng.uniform(0.25, 0.75);
      ThermalState ts = thermal_fixed_point(m);
      if (std::abs(ts.r0) < 0.08) continue;
      double gamma = decoherence_rate(m);
      double p_I = strong_coupling_state(m).p_I;
      double p_c = p_I * (1.0 - x) / x;
      double delta = m.detuning();
      m.g = 0.5 * std::sqrt(p_c * (gamma * gamma + delta * delta) / gamma);
      SteadyReport sr = solve_steady(m, SteadyOptions{false});
      if (std::abs(0.5 * sr.diag.p_c * sr.diag.r) < 5e-3) continue;
      if (0.5 * sr.diag.p_c * sr.diag.qsum < 0.04) continue;
      if (fam_name) *fam_name = name;
      return m;
    } catch (const Error&) {
      continue;
    }
  }
}

/// Driven qutrit plus a thermally coupled spectator level hanging off |2>;
/// the extra reservoir exchanges no net photons along the virtual-qubit path.
inline ModelSpec spectator_model(double g) {
  ModelSpec m = zoo::driven_qutrit({1.5, 0.5, 0.0}, 1.0, 0.8, 0.3, 0.4, g, 1.0);
  m.dim = 4;
  RVec e(4);
  e << 1.5, 0.5, 0.0, -0.7;
  m.energies = e;
  for (auto& res : m.reservoirs) {
    Mat gm = Mat::Zero(4, 4);
    gm.topLeftCorner(3, 3) = res.gamma;
    res.gamma = gm;
  }
  Reservoir dead;
  dead.label = "spectator";
  dead.p = 0.6;
  dead.R = 0.35;
  dead.gamma = make_gamma(4, {{3, 2}});
  m.reservoirs.push_back(dead);
  return m;
}

/// Three-level ladder traversed twice by the same reservoir: the
/// virtual-qubit path emits two photons into it (n = +2).
inline ModelSpec double_quantum_model(double p, double R, double g, double delta) {
  ModelSpec m;
  m.dim = 3;
  m.energies = RVec(3);
  m.energies << 1.0, -1.0, 0.0;
  m.vq0 = 0;
  m.vq1 = 1;
  m.g = g;
  m.omega_d = 2.0 - delta;
  Reservoir res;
  res.label = "ladder";
  res.p = p;
  res.R = R;
  res.gamma = make_gamma(3, {{2, 0}, {1, 2}});
  res.omega = 1.0;
  m.reservoirs.push_back(res);
  return m;
}

/// Exhaustive enumeration of simple paths between the virtual-qubit levels,
/// accumulating per-reservoir photon counts; the independent oracle for
/// derive_photon_counts.
struct PathCounts {
  std::vector<std::vector<int>> per_path;
  bool consistent = true;
};

inline PathCounts enumerate_path_counts(const ModelSpec& m) {
  struct Edge {
    int a, b, res, dir;  // dir: +1 traversing jump direction a->b
  };
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m.reservoirs.size(); ++i)
    for (const auto& e : jump_entries(m.reservoirs[i].gamma)) {
      edges.push_back({e.col, e.row, static_cast<int>(i), +1});
      edges.push_back({e.row, e.col, static_cast<int>(i), -1});
    }
  PathCounts out;
  std::vector<int> counts(m.reservoirs.size(), 0);
  std::vector<bool> visited(m.dim, false);
  std::vector<int> orient(m.reservoirs.size());
  for (std::size_t i = 0; i < m.reservoirs.size(); ++i)
    orient[i] = reservoir_orientation(m, m.reservoirs[i]);

  std::function<void(int)> dfs = [&](int v) {
    if (v == m.vq1) {
      out.per_path.push_back(counts);
      return;
    }
    visited[v] = true;
    for (const auto& e : edges) {
      if (e.a != v || visited[e.b]) continue;
      counts[e.res] += e.dir * orient[e.res];
      dfs(e.b);
      counts[e.res] -= e.dir * orient[e.res];
    }
    visited[v] = false;
  };
  dfs(m.vq0);
  for (const auto& pc : out.per_path)
    if (pc != out.per_path.front()) out.consistent = false;
  return out;
}

inline Mat random_hermitian(int dim, Rng& rng) {
  Mat a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      a(i, j) = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
  return 0.5 * (a + a.adjoint()).eval();
}

inline Mat density_from(const SteadyReport& sr, const ModelSpec& m) {
  return steady_density(m, sr.diag, sr.coherence);
}

}  // namespace tu
