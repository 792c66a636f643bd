#pragma once

#include <unsupported/Eigen/KroneckerProduct>

#include "turbox/model.hpp"

namespace turbox {

// Column-stacking convention: vec(A rho B) = (B^T \otimes A) vec(rho).

inline Vec vec(const Mat& a) {
  return Eigen::Map<const Vec>(a.data(), a.size());
}

inline Mat unvec(const Vec& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim)
    throw DimensionMismatch("unvec: length is not dim^2");
  return Eigen::Map<const Mat>(v.data(), dim, dim);
}

inline Mat sandwich_super(const Mat& a, const Mat& b) {
  return Eigen::kroneckerProduct(b.transpose(), a);
}

inline Mat left_super(const Mat& a) {
  Mat id = Mat::Identity(a.rows(), a.cols());
  return Eigen::kroneckerProduct(id, a);
}

inline Mat right_super(const Mat& b) {
  Mat id = Mat::Identity(b.rows(), b.cols());
  return Eigen::kroneckerProduct(b.transpose(), id);
}

/// Row vector that implements Tr on vectorized operators.
inline Vec trace_vector(int dim) {
  return vec(Mat::Identity(dim, dim));
}

/// Superoperator of one dissipator, optionally tilted by a counting field on
/// its jump sandwiches. The factors e^{-s chi} (gain) and e^{+s chi} (loss)
/// count physical photons: s is the sign of the reservoir's transition
/// frequency, so channels that de-excite the system while absorbing a photon
/// are counted with the opposite sign.
inline Mat dissipator_super(const Reservoir& res, int dim, double chi = 0.0,
                            int orientation = 1) {
  if (res.gamma.rows() != dim || res.gamma.cols() != dim)
    throw DimensionMismatch("jump operator shape in dissipator_super");
  const Mat& G = res.gamma;
  Mat Gd = G.adjoint();
  Mat GGd = G * Gd;
  Mat GdG = Gd * G;
  double fgain = std::exp(-orientation * chi);
  double floss = std::exp(+orientation * chi);
  Mat gain = fgain * sandwich_super(Gd, G) - 0.5 * (left_super(GGd) + right_super(GGd));
  Mat loss = floss * sandwich_super(G, Gd) - 0.5 * (left_super(GdG) + right_super(GdG));
  return res.p * (res.R * gain + res.Rbar() * loss);
}

inline Mat hamiltonian_super(const Mat& h) {
  return -kI * (left_super(h) - right_super(h));
}

/// Rotating-frame system Hamiltonian: only the detuning survives among the
/// diagonal terms, plus the coherent coupling on the virtual qubit.
inline Mat rotating_hamiltonian(const ModelSpec& m) {
  Mat h = Mat::Zero(m.dim, m.dim);
  h(m.vq0, m.vq0) = m.detuning();
  h(m.vq0, m.vq1) += m.g;
  h(m.vq1, m.vq0) += m.g;
  return h;
}

/// Full generator L0 = -i[H, .] + sum_i D_i(.) as a dim^2 x dim^2 matrix.
inline Mat assemble_liouvillian(const ModelSpec& m) {
  require_structure(m);
  Mat L = hamiltonian_super(rotating_hamiltonian(m));
  for (const auto& res : m.reservoirs) L += dissipator_super(res, m.dim);
  return L;
}

/// L0 with reservoir `label` tilted by the counting field chi.
inline Mat tilted_liouvillian(const ModelSpec& m, const std::string& label, double chi) {
  require_structure(m);
  int idx = m.reservoir_index(label);
  Mat L = hamiltonian_super(rotating_hamiltonian(m));
  for (std::size_t i = 0; i < m.reservoirs.size(); ++i) {
    const auto& res = m.reservoirs[i];
    if (static_cast<int>(i) == idx)
      L += dissipator_super(res, m.dim, chi, reservoir_orientation(m, res));
    else
      L += dissipator_super(res, m.dim);
  }
  return L;
}

/// First-order counting superoperator for one reservoir:
/// d/dchi of the tilted generator at chi = 0.
inline Mat counting_first_order(const ModelSpec& m, const std::string& label) {
  const Reservoir& res = m.reservoir(label);
  int s = reservoir_orientation(m, res);
  Mat Gd = res.gamma.adjoint();
  return s * res.p * (-res.R * sandwich_super(Gd, res.gamma) +
                      res.Rbar() * sandwich_super(res.gamma, Gd));
}

/// Second-order counting superoperator (the orientation sign squares away).
inline Mat counting_second_order(const ModelSpec& m, const std::string& label) {
  const Reservoir& res = m.reservoir(label);
  Mat Gd = res.gamma.adjoint();
  return res.p * (res.R * sandwich_super(Gd, res.gamma) +
                  res.Rbar() * sandwich_super(res.gamma, Gd));
}

}  // namespace turbox
