#pragma once

#include <array>
#include <cmath>

#include "turbox/model.hpp"

namespace turbox {
namespace zoo {

// Reference machines. Basis conventions: |0> is the upper level of each
// qubit, tensor products are ordered with qubit 1 as the most significant
// factor, so |s1 s2 ... sn> reads as a binary index.

/// Driven qubit: the virtual qubit is the physical qubit, splitting fixed to
/// 1, drive frequency chosen so the detuning equals `delta`.
inline ModelSpec driven_qubit(double p, double R, double g, double delta) {
  ModelSpec m;
  m.dim = 2;
  m.energies = RVec(2);
  m.energies << 0.5, -0.5;
  m.vq0 = 0;
  m.vq1 = 1;
  m.g = g;
  m.omega_d = 1.0 - delta;
  Reservoir res;
  res.label = "bath";
  res.p = p;
  res.R = R;
  res.gamma = make_gamma(2, {{1, 0}});
  res.omega = 1.0;
  m.reservoirs.push_back(res);
  return m;
}

/// Two resonant qubits exchanging heat between their own reservoirs; the
/// virtual qubit is the degenerate pair {|01>, |10>}.
inline ModelSpec two_qubit_transport(double p1, double p2, double R1, double R2, double g) {
  ModelSpec m;
  m.dim = 4;
  m.energies = RVec(4);
  m.energies << 1.0, 0.0, 0.0, -1.0;
  m.vq0 = 1;  // |01>
  m.vq1 = 2;  // |10>
  m.g = g;
  m.omega_d = 0.0;
  Reservoir a;
  a.label = "hot";
  a.p = p1;
  a.R = R1;
  a.gamma = make_gamma(4, {{2, 0}, {3, 1}});  // sigma1^-
  a.omega = 1.0;
  Reservoir b;
  b.label = "cold";
  b.p = p2;
  b.R = R2;
  b.gamma = make_gamma(4, {{1, 0}, {3, 2}});  // sigma2^-
  b.omega = 1.0;
  m.reservoirs = {a, b};
  return m;
}

/// Driven qutrit: levels |0>, |1> form the virtual qubit, both connected to
/// the shared level |2> through separate reservoirs.
inline ModelSpec driven_qutrit(const std::array<double, 3>& E, double p0, double p1,
                               double R0, double R1, double g, double omega_d) {
  ModelSpec m;
  m.dim = 3;
  m.energies = RVec(3);
  m.energies << E[0], E[1], E[2];
  m.vq0 = 0;
  m.vq1 = 1;
  m.g = g;
  m.omega_d = omega_d;
  Reservoir r0;
  r0.label = "bath0";
  r0.p = p0;
  r0.R = R0;
  r0.gamma = make_gamma(3, {{2, 0}});
  r0.omega = E[0] - E[2];
  Reservoir r1;
  r1.label = "bath1";
  r1.p = p1;
  r1.R = R1;
  r1.gamma = make_gamma(3, {{2, 1}});
  r1.omega = E[1] - E[2];
  m.reservoirs = {r0, r1};
  return m;
}

/// Three-qubit absorption refrigerator with resonance w1 + w3 = w2; the
/// virtual qubit is {|010>, |101>}.
inline ModelSpec three_qubit_fridge(const std::array<double, 3>& omegas,
                                    const std::array<double, 3>& p,
                                    const std::array<double, 3>& R, double g) {
  if (std::abs(omegas[0] + omegas[2] - omegas[1]) >
      kTolRel * (1.0 + std::abs(omegas[1])))
    throw InvalidModel("refrigerator requires w1 + w3 = w2");
  ModelSpec m;
  m.dim = 8;
  m.energies = RVec(8);
  for (int k = 0; k < 8; ++k) {
    int s1 = (k >> 2) & 1, s2 = (k >> 1) & 1, s3 = k & 1;
    m.energies(k) = 0.5 * (omegas[0] * (1 - 2 * s1) + omegas[1] * (1 - 2 * s2) +
                           omegas[2] * (1 - 2 * s3));
  }
  m.vq0 = 2;  // |010>
  m.vq1 = 5;  // |101>
  m.g = g;
  m.omega_d = 0.0;
  for (int i = 0; i < 3; ++i) {
    Reservoir res;
    res.label = "bath" + std::to_string(i + 1);
    res.p = p[i];
    res.R = R[i];
    std::vector<std::pair<int, int>> entries;
    int bit = 2 - i;  // qubit 1 is the most significant bit
    for (int k = 0; k < 8; ++k)
      if (((k >> bit) & 1) == 0) entries.push_back({k | (1 << bit), k});
    res.gamma = make_gamma(8, entries);
    res.omega = omegas[i];
    m.reservoirs.push_back(res);
  }
  return m;
}

/// Rotation parameters mapping the resonant global-approach qutrit onto the
/// local form: dressed energies, effective coupling, and effective detuning.
struct GlobalMapping {
  double theta = 0.0;
  std::array<double, 3> eps{};
  double g_tilde = 0.0;
  double delta_tilde = 0.0;
  double omega_d_eff = 0.0;
};

inline GlobalMapping global_mapping(const std::array<double, 3>& E, double g, double omega_d) {
  if (E[0] == E[1] && g == 0.0)
    throw InvalidModel("global mapping needs E0 != E1 or g > 0");
  GlobalMapping gm;
  gm.theta = 0.5 * std::atan2(2.0 * g, E[0] - E[1]);
  double half_split = 0.5 * std::hypot(E[0] - E[1], 2.0 * g);
  double mid = 0.5 * (E[0] + E[1]);
  gm.eps = {mid + half_split, mid - half_split, E[2]};
  gm.g_tilde = 0.5 * omega_d * std::sin(2.0 * gm.theta);
  gm.omega_d_eff = omega_d * std::cos(2.0 * gm.theta);
  gm.delta_tilde = gm.eps[0] - gm.eps[1] - gm.omega_d_eff;
  return gm;
}

/// Driven qutrit in the global approach, expressed as the equivalent local
/// model in the dressed basis. Reservoir rates pass through unchanged.
inline std::pair<GlobalMapping, ModelSpec> global_to_local(const std::array<double, 3>& E,
                                                           double g, double omega_d,
                                                           double p0, double p1,
                                                           double R0, double R1) {
  GlobalMapping gm = global_mapping(E, g, omega_d);
  ModelSpec local = driven_qutrit(gm.eps, p0, p1, R0, R1, gm.g_tilde, gm.omega_d_eff);
  return {gm, local};
}

// Closed-form reference values, used as regression anchors for the generic
// solvers.

struct QubitRefs {
  double gamma, r0, p_I;
  double tr_xi(double r) const { return (r + 1.0 / r) / (p_I * r0); }
  double Q_d(double r) const {
    return std::log((1.0 + r0) / (1.0 - r0)) / r0 * (1.0 - r * (r0 - r));
  }
  double Q_c(double r) const {
    return -std::log((1.0 + r0) / (1.0 - r0)) * 2.0 / r0 * r * (r0 - r);
  }
};

inline QubitRefs qubit_refs(double p, double R) {
  return {0.5 * p, 2.0 * R - 1.0, p};
}

struct TwoQubitRefs {
  double gamma, r0, p_I, d, d0, d1, P0, P1, P, A, B, A1;
};

inline TwoQubitRefs two_qubit_refs(double p1, double p2, double R1, double R2) {
  TwoQubitRefs f;
  f.gamma = 0.5 * (p1 + p2);
  f.r0 = R1 - R2;
  f.p_I = p1 * p2 / f.gamma;
  double up = p1 * R1 + p2 * R2;
  double dn = p1 * (1 - R1) + p2 * (1 - R2);
  f.d = up * dn / (2.0 * f.gamma * f.gamma);
  f.d0 = up / dn * f.d / 2.0;
  f.d1 = 1.0 - f.d - f.d0;
  f.P0 = R1 * (1 - R2);
  f.P1 = (1 - R1) * R2;
  f.P = f.P0 + f.P1;
  double s = (p1 + p2) * (p1 + p2) * f.P;
  f.A = -2.0 * (p1 * p1 + p2 * p2) / s;
  f.B = -2.0 * p1 * p2 * f.r0 / s;
  f.A1 = -2.0 / f.P;
  return f;
}

/// Minimal uncertainty of the symmetric two-qubit machine at r = 3 r0 / 8.
inline double two_qubit_symmetric_qmin(double R1, double R2) {
  double P0 = R1 * (1 - R2), P1 = (1 - R1) * R2;
  double P = P0 + P1, r0 = R1 - R2;
  return std::log(P0 / P1) * P / r0 * (1.0 - 25.0 * r0 * r0 / (32.0 * P));
}

struct QutritRefs {
  double gamma, P0, P1, P2, d, p_I, A, B;
};

inline QutritRefs qutrit_refs(double p0, double p1, double R0, double R1) {
  QutritRefs f;
  f.gamma = 0.5 * (p0 * (1 - R0) + p1 * (1 - R1));
  double z = 1.0 - R0 * R1;
  f.P0 = R0 * (1 - R1) / z;
  f.P1 = (1 - R0) * R1 / z;
  f.P2 = (1 - R0) * (1 - R1) / z;
  double w = p0 + p1 + p0 * R0 + p1 * R1;
  f.d = 2.0 * (p0 * R0 + p1 * R1) / w;
  f.p_I = 2.0 * p0 * p1 * z / w;
  double s = p0 * (1 + R0) + p1 * (1 + R1);
  double P = f.P0 + f.P1;
  f.A = -2.0 *
        (p0 * p0 * (1 + R0) + p1 * p1 * (1 + R1) + p0 * p1 * (R0 + R1 + 2 * R0 * R1)) /
        (s * s * P);
  f.B = -4.0 * p0 * p1 * (R0 - R1) / (s * s * P);
  return f;
}

/// xi_d coefficient on |2><2| for the qutrit, given the steady q_2.
inline double qutrit_xi2(double p0, double p1, double R0, double R1, double q2) {
  return -q2 / (p0 * R0 + p1 * R1);
}

/// Engine or refrigerator operation requires both virtual-qubit levels on the
/// same side of the shared level |2>.
inline bool qutrit_engine_ordering(const ModelSpec& m) {
  double w0 = m.energies(0) - m.energies(2);
  double w1 = m.energies(1) - m.energies(2);
  return w0 * w1 > 0.0;
}

struct FridgeRefs {
  double gamma;
};

inline FridgeRefs fridge_refs(const std::array<double, 3>& p) {
  return {0.5 * (p[0] + p[1] + p[2])};
}

/// Exact strong-coupling rate of the refrigerator with equal couplings and
/// all occupations at 1/2, from the hypercube-walk mode decomposition.
inline double fridge_symmetric_half_p_I(double p) { return 1.2 * p; }

/// Symmetric-rate refrigerator profile coefficients (p1 = p2 = p3).
inline std::pair<double, double> fridge_symmetric_A1_B(double P, double r0) {
  double s = (9.0 + 4.0 * P) * (9.0 + 4.0 * P) * P;
  return {-6.0 * (27.0 + 20.0 * P) / s, -108.0 * r0 / s};
}

}  // namespace zoo
}  // namespace turbox
