#pragma once

#include <cmath>
#include <functional>
#include <map>

#include "turbox/steady.hpp"
#include "turbox/zoo.hpp"

namespace turbox {

using ParamMap = std::map<std::string, double>;

/// A machine family exposed through named scalar parameters. Parameters left
/// at NaN defaults are "unset" and resolved by the builder; the derived
/// control `r_over_r0` replaces the raw coupling g, with g recovered from
/// p_c = p_I (r0 - r)/r at the family's detuning.
struct ModelFamily {
  std::string name;
  ParamMap defaults;
  std::function<ModelSpec(const ParamMap&)> builder;
  // Adjusts the occupation that drives the thermal imbalance so the built
  // model has r0 equal to the requested value (near-Carnot paths).
  std::function<ParamMap(double, const ParamMap&)> carnot_path;

  ParamMap resolve(const ParamMap& overrides) const {
    ParamMap p = defaults;
    for (const auto& [k, v] : overrides) {
      if (!defaults.count(k))
        throw InvalidModel("family '" + name + "' has no parameter '" + k + "'");
      p[k] = v;
    }
    return p;
  }

  ModelSpec build(const ParamMap& overrides) const { return builder(resolve(overrides)); }
};

namespace detail {

inline bool set(const ParamMap& p, const std::string& k) {
  auto it = p.find(k);
  return it != p.end() && std::isfinite(it->second);
}

/// Replace g so that the built model sits at the requested r/r0.
inline ModelSpec with_imbalance_ratio(ModelSpec m, double x) {
  if (!(x > 0.0 && x < 1.0))
    throw InvalidModel("r_over_r0 must lie in (0,1)");
  double gamma = decoherence_rate(m);
  double p_I = strong_coupling_state(m).p_I;
  double p_c = p_I * (1.0 - x) / x;
  double delta = m.detuning();
  m.g = 0.5 * std::sqrt(p_c * (gamma * gamma + delta * delta) / gamma);
  return m;
}

inline ModelSpec finalize(ModelSpec m, const ParamMap& p) {
  if (set(p, "r_over_r0")) return with_imbalance_ratio(std::move(m), p.at("r_over_r0"));
  return m;
}

}  // namespace detail

inline ModelFamily qubit_family() {
  ModelFamily f;
  f.name = "qubit";
  double nan = std::nan("");
  f.defaults = {{"p", 1.0},     {"R", 0.7},          {"g", 0.25},
                {"delta", 0.0}, {"r0", nan},         {"r_over_r0", nan}};
  f.builder = [](const ParamMap& p) {
    double R = detail::set(p, "r0") ? 0.5 * (1.0 + p.at("r0")) : p.at("R");
    ModelSpec m = zoo::driven_qubit(p.at("p"), R, p.at("g"), p.at("delta"));
    return detail::finalize(std::move(m), p);
  };
  f.carnot_path = [](double r0, const ParamMap& base) {
    ParamMap out = base;
    out["r0"] = r0;
    return out;
  };
  return f;
}

inline ModelFamily two_qubit_family() {
  ModelFamily f;
  f.name = "two-qubit";
  double nan = std::nan("");
  f.defaults = {{"p1", 1.0}, {"p2", 1.0}, {"R1", 0.7}, {"R2", 0.3},
                {"g", 0.2},  {"r0", nan}, {"r_over_r0", nan}};
  f.builder = [](const ParamMap& p) {
    double R2 = detail::set(p, "r0") ? p.at("R1") - p.at("r0") : p.at("R2");
    ModelSpec m = zoo::two_qubit_transport(p.at("p1"), p.at("p2"), p.at("R1"), R2, p.at("g"));
    return detail::finalize(std::move(m), p);
  };
  f.carnot_path = [](double r0, const ParamMap& base) {
    ParamMap out = base;
    out["R1"] = 0.5;
    out["r0"] = r0;
    return out;
  };
  return f;
}

inline ModelFamily qutrit_family() {
  ModelFamily f;
  f.name = "qutrit";
  double nan = std::nan("");
  f.defaults = {{"p0", 1.0},  {"p1", 0.8},  {"p_ratio", nan}, {"R0", 0.7},
                {"R1", 0.3},  {"g", 0.2},   {"E0", 1.5},      {"E1", 0.5},
                {"E2", 0.0},  {"omega_d", nan}, {"delta", nan},
                {"r0", nan},  {"r_over_r0", nan}};
  f.builder = [](const ParamMap& p) {
    double p1 = detail::set(p, "p_ratio") ? p.at("p_ratio") * p.at("p0") : p.at("p1");
    double R0 = p.at("R0");
    if (detail::set(p, "r0")) {
      double t = p.at("r0"), R1 = p.at("R1");
      R0 = (R1 + t) / (1.0 + t * R1);
    }
    double split = p.at("E0") - p.at("E1");
    double omega_d = split;  // resonant drive unless told otherwise
    if (detail::set(p, "omega_d")) omega_d = p.at("omega_d");
    if (detail::set(p, "delta")) omega_d = split - p.at("delta");
    ModelSpec m = zoo::driven_qutrit({p.at("E0"), p.at("E1"), p.at("E2")}, p.at("p0"), p1,
                                     R0, p.at("R1"), p.at("g"), omega_d);
    return detail::finalize(std::move(m), p);
  };
  f.carnot_path = [](double r0, const ParamMap& base) {
    ParamMap out = base;
    out["r0"] = r0;
    return out;
  };
  return f;
}

inline ModelFamily fridge_family() {
  ModelFamily f;
  f.name = "fridge";
  double nan = std::nan("");
  f.defaults = {{"p1", 1.0}, {"p2", 1.0}, {"p3", 1.0}, {"R1", 0.4},
                {"R2", 0.4}, {"R3", 0.4}, {"g", 0.2},  {"w1", 1.0},
                {"w3", 1.0}, {"r0", nan}, {"r_over_r0", nan}};
  f.builder = [](const ParamMap& p) {
    double R1 = p.at("R1");
    if (detail::set(p, "r0")) {
      double t = p.at("r0"), R2 = p.at("R2"), R3 = p.at("R3");
      double denom = (1.0 - R2) * R3 + R2 * (1.0 - R3);
      R1 = (t + R2 * (1.0 - R3)) / denom;
    }
    double w1 = p.at("w1"), w3 = p.at("w3");
    ModelSpec m = zoo::three_qubit_fridge({w1, w1 + w3, w3}, {p.at("p1"), p.at("p2"), p.at("p3")},
                                          {R1, p.at("R2"), p.at("R3")}, p.at("g"));
    return detail::finalize(std::move(m), p);
  };
  f.carnot_path = [](double r0, const ParamMap& base) {
    ParamMap out = base;
    out["r0"] = r0;
    return out;
  };
  return f;
}

inline ModelFamily qutrit_global_family() {
  ModelFamily f;
  f.name = "qutrit-global";
  f.defaults = {{"E0", 1.2}, {"E1", 0.8}, {"E2", 0.0}, {"g", 0.2}, {"omega_d", 1.0},
                {"p0", 1.0}, {"p1", 0.8}, {"R0", 0.7}, {"R1", 0.3}};
  f.builder = [](const ParamMap& p) {
    auto [gm, local] = zoo::global_to_local({p.at("E0"), p.at("E1"), p.at("E2")}, p.at("g"),
                                            p.at("omega_d"), p.at("p0"), p.at("p1"),
                                            p.at("R0"), p.at("R1"));
    (void)gm;
    return local;
  };
  return f;
}

inline const ModelFamily& family(const std::string& name) {
  static const std::map<std::string, ModelFamily> registry = [] {
    std::map<std::string, ModelFamily> r;
    for (auto f : {qubit_family(), two_qubit_family(), qutrit_family(), fridge_family(),
                   qutrit_global_family()})
      r[f.name] = f;
    return r;
  }();
  auto it = registry.find(name);
  if (it == registry.end()) throw InvalidModel("unknown model family '" + name + "'");
  return it->second;
}

}  // namespace turbox
