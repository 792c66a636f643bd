#pragma once

#include "turbox/steady.hpp"

namespace turbox {

namespace detail {

/// Raw jump current of one reservoir on a given state (Eq.-(12)-style trace):
/// net rate of jumps along the operator direction.
inline double jump_current(const Reservoir& res, const Mat& rho) {
  const Mat& G = res.gamma;
  Complex t = (-res.R * (G.adjoint() * rho * G).trace() +
               res.Rbar() * (G * rho * G.adjoint()).trace());
  return res.p * t.real();
}

}  // namespace detail

inline ValidationReport validate_model(const ModelSpec& m) {
  ValidationReport rep;
  std::string why;
  if (!detail::structurally_sound(m, &why)) {
    rep.checks.push_back({"structure", false, why});
    return rep;
  }
  rep.checks.push_back({"structure", true, ""});

  // (a) coherence confinement, per reservoir and for the diagonal sector
  {
    bool ok = true;
    std::string detail_msg;
    for (const auto& res : m.reservoirs) {
      Mat img = apply_dissipator(res, matrix_unit(m.dim, m.vq0, m.vq1));
      Mat rest = img;
      rest(m.vq0, m.vq1) = 0.0;
      if (rest.cwiseAbs().maxCoeff() > kTolAbs) {
        ok = false;
        detail_msg = "reservoir '" + res.label + "' maps |0><1| outside the virtual qubit";
        break;
      }
      for (int j = 0; j < m.dim; ++j) {
        Mat dimg = apply_dissipator(res, matrix_unit(m.dim, j, j));
        Mat off = dimg;
        off.diagonal().setZero();
        if (off.cwiseAbs().maxCoeff() > kTolAbs) {
          ok = false;
          detail_msg = "reservoir '" + res.label + "' creates coherence from level " + std::to_string(j);
          break;
        }
      }
      if (!ok) break;
      try {
        reservoir_gap(m, res);
      } catch (const Error& e) {
        ok = false;
        detail_msg = e.what();
        break;
      }
      if (res.omega) {
        double gap = reservoir_gap(m, res);
        if (std::abs(*res.omega - gap) > kTolRel * (1.0 + std::abs(gap))) {
          ok = false;
          detail_msg = "reservoir '" + res.label + "' declares omega inconsistent with its level gap";
          break;
        }
      }
      if (res.omega && res.temperature) {
        double lhs = res.R / res.Rbar();
        double rhs = std::exp(-*res.omega / *res.temperature);
        if (std::abs(lhs - rhs) > kTolRel * (std::abs(lhs) + std::abs(rhs))) {
          ok = false;
          detail_msg = "reservoir '" + res.label + "': R/(1-R) != exp(-omega/T)";
          break;
        }
      }
    }
    rep.checks.push_back({"coherence_confinement", ok, detail_msg});
  }

  // (b) connectivity and (c) photon-count consistency
  bool connected = false;
  {
    bool ok = true;
    std::string detail_msg;
    try {
      derive_photon_counts_raw(m);
      connected = true;
    } catch (const Disconnected& e) {
      ok = false;
      detail_msg = e.what();
    } catch (const InconsistentPaths&) {
      connected = true;  // reachable, but counts conflict; reported below
    } catch (const Error& e) {
      ok = false;
      detail_msg = e.what();
    }
    rep.checks.push_back({"connectivity", ok && connected, detail_msg});
  }
  {
    bool ok = true;
    std::string detail_msg;
    if (!connected) {
      ok = false;
      detail_msg = "graph disconnected";
    } else {
      try {
        derive_photon_counts(m);
      } catch (const Error& e) {
        ok = false;
        detail_msg = e.what();
      }
    }
    rep.checks.push_back({"photon_consistency", ok, detail_msg});
  }

  // (d) unique g=0 steady state with vanishing currents
  {
    bool ok = true;
    std::string detail_msg;
    try {
      ThermalState ts = thermal_fixed_point(m);
      Mat tau = Mat::Zero(m.dim, m.dim);
      tau.diagonal() = ts.populations.cast<Complex>();
      for (const auto& res : m.reservoirs) {
        double j = detail::jump_current(res, tau);
        if (std::abs(j) > 1e-8) {
          ok = false;
          detail_msg = "reservoir '" + res.label + "' carries current in the g=0 steady state";
          break;
        }
      }
    } catch (const Error& e) {
      ok = false;
      detail_msg = e.what();
    }
    rep.checks.push_back({"detailed_balance", ok, detail_msg});
  }

  return rep;
}

}  // namespace turbox
