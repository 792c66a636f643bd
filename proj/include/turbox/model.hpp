#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "turbox/common.hpp"

namespace turbox {

/// One dissipation channel. The jump operator acts in the bare eigenbasis and
/// is stored dense; `n` is the net photon count this reservoir exchanges along
/// the virtual-qubit transition path (derived from the level graph unless set
/// explicitly, e.g. for classical-counterpart models whose graph is cyclic).
struct Reservoir {
  std::string label;
  double p = 0.0;  // coupling strength, > 0
  double R = 0.0;  // thermal occupation factor, in (0,1); Rbar = 1 - R
  Mat gamma;       // jump operator
  std::optional<int> n;
  std::optional<double> omega;
  std::optional<double> temperature;

  double Rbar() const { return 1.0 - R; }
};

/// Full machine description: bare spectrum, the coherently coupled level pair
/// (the virtual qubit), drive frequency, and the dissipation channels.
struct ModelSpec {
  int dim = 0;
  RVec energies;
  int vq0 = 0;  // index of the upper virtual-qubit level
  int vq1 = 1;  // index of the lower virtual-qubit level
  double g = 0.0;
  double omega_d = 0.0;
  std::vector<Reservoir> reservoirs;

  double detuning() const { return energies(vq0) - energies(vq1) - omega_d; }

  const Reservoir& reservoir(const std::string& label) const {
    for (const auto& r : reservoirs)
      if (r.label == label) return r;
    throw UnknownReservoir(label);
  }
  int reservoir_index(const std::string& label) const {
    for (std::size_t i = 0; i < reservoirs.size(); ++i)
      if (reservoirs[i].label == label) return static_cast<int>(i);
    throw UnknownReservoir(label);
  }
};

/// Nonzero entry of a jump operator: amp * |row><col|. The jump direction is
/// col -> row (a quantum of energy E_col - E_row leaves the system).
struct JumpEntry {
  int row = 0;
  int col = 0;
  Complex amp;
};

inline std::vector<JumpEntry> jump_entries(const Mat& gamma, double tol = kTolAbs) {
  std::vector<JumpEntry> out;
  for (int c = 0; c < gamma.cols(); ++c)
    for (int r = 0; r < gamma.rows(); ++r)
      if (std::abs(gamma(r, c)) > tol) out.push_back({r, c, gamma(r, c)});
  return out;
}

/// Jump operator with unit amplitude at each (row, col) position.
inline Mat make_gamma(int dim, const std::vector<std::pair<int, int>>& entries) {
  Mat g = Mat::Zero(dim, dim);
  for (auto [r, c] : entries) {
    if (r < 0 || r >= dim || c < 0 || c >= dim)
      throw DimensionMismatch("gamma entry outside dimension");
    g(r, c) += 1.0;
  }
  return g;
}

/// Transition frequency of a reservoir: the energy gap E_col - E_row shared by
/// every entry of its jump operator.
inline double reservoir_gap(const ModelSpec& m, const Reservoir& res) {
  auto entries = jump_entries(res.gamma);
  if (entries.empty()) throw InvalidModel("reservoir '" + res.label + "' has empty jump operator");
  double gap = m.energies(entries[0].col) - m.energies(entries[0].row);
  for (const auto& e : entries) {
    double g = m.energies(e.col) - m.energies(e.row);
    if (std::abs(g - gap) > kTolRel * (1.0 + std::abs(gap)))
      throw InvalidModel("reservoir '" + res.label + "' couples level pairs with different gaps");
  }
  return gap;
}

/// Sign of the physical photon frequency for a reservoir. Jumps along the
/// operator direction emit one photon when the gap is positive and absorb one
/// when it is negative; a zero gap (infinite-temperature channel) counts as +1.
inline int reservoir_orientation(const ModelSpec& m, const Reservoir& res) {
  return reservoir_gap(m, res) < 0.0 ? -1 : 1;
}

/// D_i(rho) = p R (G* rho G - {G G*, rho}/2) + p Rbar (G rho G* - {G* G, rho}/2)
/// with G the jump operator, acting on a plain matrix.
inline Mat apply_dissipator(const Reservoir& res, const Mat& rho) {
  if (res.gamma.rows() != rho.rows() || res.gamma.cols() != rho.cols())
    throw DimensionMismatch("jump operator vs state in apply_dissipator");
  const Mat& G = res.gamma;
  Mat Gd = G.adjoint();
  Mat GGd = G * Gd;
  Mat GdG = Gd * G;
  Mat gain = Gd * rho * G - 0.5 * (GGd * rho + rho * GGd);
  Mat loss = G * rho * Gd - 0.5 * (GdG * rho + rho * GdG);
  return res.p * (res.R * gain + res.Rbar() * loss);
}

inline Mat apply_all_dissipators(const ModelSpec& m, const Mat& rho) {
  Mat out = Mat::Zero(rho.rows(), rho.cols());
  for (const auto& res : m.reservoirs) out += apply_dissipator(res, rho);
  return out;
}

/// Net photon counts per reservoir along the |Phi_0> -> |Phi_1> transition
/// path, plus the raw jump counts (photon count without the frequency-sign
/// factor). Consistency over all paths is certified by checking every cycle
/// of the transition multigraph against a spanning-tree potential.
struct PhotonCounts {
  std::vector<int> photon;  // per reservoir, signed by the transition frequency
  std::vector<int> jump;    // per reservoir, +1 per forward jump regardless of gap sign
};

namespace detail {

struct GraphEdge {
  int from = 0;  // jump source (column index)
  int to = 0;    // jump target (row index)
  int res = 0;
};

inline std::vector<GraphEdge> transition_edges(const ModelSpec& m) {
  std::vector<GraphEdge> edges;
  for (std::size_t i = 0; i < m.reservoirs.size(); ++i)
    for (const auto& e : jump_entries(m.reservoirs[i].gamma))
      edges.push_back({e.col, e.row, static_cast<int>(i)});
  return edges;
}

}  // namespace detail

inline PhotonCounts derive_photon_counts_raw(const ModelSpec& m) {
  const int nres = static_cast<int>(m.reservoirs.size());
  auto edges = detail::transition_edges(m);

  // BFS spanning tree; phi[v] accumulates per-reservoir jump counts from node 0.
  std::vector<std::vector<int>> phi(m.dim);
  std::vector<bool> seen(m.dim, false);
  std::vector<int> queue{0};
  seen[0] = true;
  phi[0].assign(nres, 0);
  std::vector<std::vector<std::pair<int, int>>> adj(m.dim);  // node -> (edge idx, direction)
  for (std::size_t k = 0; k < edges.size(); ++k) {
    adj[edges[k].from].push_back({static_cast<int>(k), +1});
    adj[edges[k].to].push_back({static_cast<int>(k), -1});
  }
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    int v = queue[qi];
    for (auto [k, dir] : adj[v]) {
      int w = dir > 0 ? edges[k].to : edges[k].from;
      if (seen[w]) continue;
      seen[w] = true;
      phi[w] = phi[v];
      phi[w][edges[k].res] += dir;
      queue.push_back(w);
    }
  }
  if (static_cast<int>(queue.size()) != m.dim)
    throw Disconnected("transition graph does not connect all levels");

  // Every edge must be consistent with the potential; otherwise two paths
  // somewhere in the graph disagree on the exchanged photon numbers.
  for (const auto& e : edges) {
    for (int i = 0; i < nres; ++i) {
      int expect = (i == e.res) ? 1 : 0;
      if (phi[e.to][i] - phi[e.from][i] != expect)
        throw InconsistentPaths("reservoir '" + m.reservoirs[e.res].label +
                                "' photon count differs between transition paths");
    }
  }

  PhotonCounts counts;
  counts.jump.resize(nres);
  counts.photon.resize(nres);
  for (int i = 0; i < nres; ++i) {
    counts.jump[i] = phi[m.vq1][i] - phi[m.vq0][i];
    counts.photon[i] = counts.jump[i] * reservoir_orientation(m, m.reservoirs[i]);
  }
  return counts;
}

/// Photon counts keyed by reservoir label. User-supplied counts must agree.
inline std::map<std::string, int> derive_photon_counts(const ModelSpec& m) {
  auto counts = derive_photon_counts_raw(m);
  std::map<std::string, int> out;
  for (std::size_t i = 0; i < m.reservoirs.size(); ++i) {
    const auto& res = m.reservoirs[i];
    if (res.n && *res.n != counts.photon[i])
      throw InconsistentPaths("reservoir '" + res.label + "' declares n=" +
                              std::to_string(*res.n) + " but paths give n=" +
                              std::to_string(counts.photon[i]));
    out[res.label] = counts.photon[i];
  }
  return out;
}

/// Per-reservoir photon counts, preferring explicit values. Only when some
/// reservoir lacks one is the transition graph consulted; counterpart models
/// carry explicit counts because their graph is deliberately cyclic.
inline std::vector<int> resolved_photon_counts(const ModelSpec& m) {
  std::vector<int> out(m.reservoirs.size());
  bool all_explicit = true;
  for (std::size_t i = 0; i < m.reservoirs.size(); ++i) {
    if (m.reservoirs[i].n)
      out[i] = *m.reservoirs[i].n;
    else
      all_explicit = false;
  }
  if (all_explicit) return out;
  auto counts = derive_photon_counts_raw(m);
  for (std::size_t i = 0; i < m.reservoirs.size(); ++i)
    out[i] = m.reservoirs[i].n ? *m.reservoirs[i].n : counts.photon[i];
  return out;
}

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const ValidationCheck& c) { return c.passed; });
  }
};

namespace detail {

inline bool structurally_sound(const ModelSpec& m, std::string* why) {
  if (m.dim < kMinDim || m.dim > kMaxDim) { *why = "dim outside [2,16]"; return false; }
  if (m.energies.size() != m.dim) { *why = "energies length != dim"; return false; }
  if (!m.energies.allFinite()) { *why = "non-finite energies"; return false; }
  if (m.vq0 == m.vq1 || m.vq0 < 0 || m.vq1 < 0 || m.vq0 >= m.dim || m.vq1 >= m.dim) {
    *why = "virtual-qubit indices invalid"; return false;
  }
  if (m.g < 0 || !std::isfinite(m.g) || !std::isfinite(m.omega_d)) {
    *why = "coupling/drive invalid"; return false;
  }
  if (!std::isfinite(m.detuning())) { *why = "detuning not finite"; return false; }
  if (m.reservoirs.empty()) { *why = "no reservoirs"; return false; }
  for (const auto& res : m.reservoirs) {
    if (res.p <= 0 || !std::isfinite(res.p)) { *why = "reservoir '" + res.label + "': p must be > 0"; return false; }
    if (!(res.R > 0 && res.R < 1)) { *why = "reservoir '" + res.label + "': R must be in (0,1)"; return false; }
    if (res.gamma.rows() != m.dim || res.gamma.cols() != m.dim) {
      *why = "reservoir '" + res.label + "': jump operator shape"; return false;
    }
    if (jump_entries(res.gamma).empty()) { *why = "reservoir '" + res.label + "': empty jump operator"; return false; }
    if (res.temperature && *res.temperature <= 0) {
      *why = "reservoir '" + res.label + "': temperature must be > 0"; return false;
    }
  }
  return true;
}

}  // namespace detail

/// Throwing structural precondition used by the solvers.
inline void require_structure(const ModelSpec& m) {
  std::string why;
  if (!detail::structurally_sound(m, &why)) throw InvalidModel(why);
}

inline double decoherence_rate(const ModelSpec& m);

/// Model-class validation. Report-valued: each check records pass/fail.
///  (a) coherence confinement: dissipators map diagonal states to diagonal
///      states and the virtual-qubit coherence to itself;
///  (b) the transition graph connects all levels;
///  (c) photon counts are path-independent and match any declared values;
///  (d) the g=0 steady state exists, is unique, and carries zero currents.
ValidationReport validate_model(const ModelSpec& m);

/// gamma, defined through D(|Phi_1><Phi_0|) = -gamma |Phi_1><Phi_0|.
inline double decoherence_rate(const ModelSpec& m) {
  require_structure(m);
  Mat coh = matrix_unit(m.dim, m.vq1, m.vq0);
  Mat image = apply_all_dissipators(m, coh);
  Complex coeff = image(m.vq1, m.vq0);
  image(m.vq1, m.vq0) = 0.0;
  if (image.cwiseAbs().maxCoeff() > kTolAbs)
    throw NotConfined("dissipators map the virtual-qubit coherence outside its subspace");
  if (std::abs(coeff.imag()) > kTolAbs)
    throw NotConfined("virtual-qubit decoherence coefficient is not real");
  double gamma = -coeff.real();
  if (!(gamma > 0)) throw NotConfined("decoherence rate must be positive");
  return gamma;
}

}  // namespace turbox
