#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "turbox/fcs.hpp"
#include "turbox/optimize.hpp"

namespace turbox {

using Json = nlohmann::ordered_json;

namespace detail {

inline void reject_unknown(const Json& j, const std::vector<std::string>& allowed,
                           const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw IoError("unknown field '" + it.key() + "' in " + where);
  }
}

inline void require_fields(const Json& j, const std::vector<std::string>& fields,
                           const std::string& where) {
  for (const auto& f : fields)
    if (!j.contains(f)) throw IoError("missing field '" + f + "' in " + where);
}

}  // namespace detail

// ModelSpec wire format:
// {dim, energies:[...], vq:[i0,i1], g, omega_d,
//  reservoirs:[{label,p,R,omega?,temperature?,gamma:[[k,l],...], n?}]}

inline Json to_json(const ModelSpec& m) {
  Json j;
  j["dim"] = m.dim;
  j["energies"] = std::vector<double>(m.energies.data(), m.energies.data() + m.energies.size());
  j["vq"] = {m.vq0, m.vq1};
  j["g"] = m.g;
  j["omega_d"] = m.omega_d;
  j["reservoirs"] = Json::array();
  for (const auto& res : m.reservoirs) {
    Json r;
    r["label"] = res.label;
    r["p"] = res.p;
    r["R"] = res.R;
    if (res.omega) r["omega"] = *res.omega;
    if (res.temperature) r["temperature"] = *res.temperature;
    Json entries = Json::array();
    for (const auto& e : jump_entries(res.gamma)) {
      if (std::abs(e.amp - Complex(1.0, 0.0)) > kTolAbs)
        throw IoError("only unit jump entries are serializable");
      entries.push_back({e.row, e.col});
    }
    r["gamma"] = entries;
    if (res.n) r["n"] = *res.n;
    j["reservoirs"].push_back(r);
  }
  return j;
}

inline ModelSpec model_from_json(const Json& j) {
  detail::reject_unknown(j, {"dim", "energies", "vq", "g", "omega_d", "reservoirs"}, "model");
  detail::require_fields(j, {"dim", "energies", "vq", "g", "omega_d", "reservoirs"}, "model");
  ModelSpec m;
  m.dim = j.at("dim").get<int>();
  auto evec = j.at("energies").get<std::vector<double>>();
  m.energies = Eigen::Map<const RVec>(evec.data(), evec.size());
  auto vq = j.at("vq").get<std::vector<int>>();
  if (vq.size() != 2) throw IoError("vq must have exactly two indices");
  m.vq0 = vq[0];
  m.vq1 = vq[1];
  m.g = j.at("g").get<double>();
  m.omega_d = j.at("omega_d").get<double>();
  for (const auto& rj : j.at("reservoirs")) {
    detail::reject_unknown(rj, {"label", "p", "R", "omega", "temperature", "gamma", "n"},
                           "reservoir");
    detail::require_fields(rj, {"label", "p", "R", "gamma"}, "reservoir");
    Reservoir res;
    res.label = rj.at("label").get<std::string>();
    res.p = rj.at("p").get<double>();
    res.R = rj.at("R").get<double>();
    std::vector<std::pair<int, int>> entries;
    for (const auto& e : rj.at("gamma")) {
      auto pr = e.get<std::vector<int>>();
      if (pr.size() != 2) throw IoError("gamma entries must be [row, col] pairs");
      entries.push_back({pr[0], pr[1]});
    }
    res.gamma = make_gamma(m.dim, entries);
    if (rj.contains("omega")) res.omega = rj.at("omega").get<double>();
    if (rj.contains("temperature")) res.temperature = rj.at("temperature").get<double>();
    if (rj.contains("n")) res.n = rj.at("n").get<int>();
    m.reservoirs.push_back(res);
  }
  return m;
}

inline Json to_json(const ValidationReport& rep) {
  Json j;
  j["passed"] = rep.all_passed();
  j["checks"] = Json::array();
  for (const auto& c : rep.checks)
    j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return j;
}

// SteadyReport wire format:
// {tau, rho_I, p_I, gamma, p_c, rho_d, r, r0, coherence:{x,y}, xi:{diag,trace}}

inline Json to_json(const SteadyReport& sr) {
  auto vec_of = [](const RVec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  Json j;
  j["tau"] = vec_of(sr.tau.populations);
  j["rho_I"] = vec_of(sr.rho_I.populations);
  j["p_I"] = sr.rho_I.p_I;
  j["gamma"] = sr.gamma;
  j["p_c"] = sr.diag.p_c;
  j["rho_d"] = vec_of(sr.diag.q);
  j["r"] = sr.diag.r;
  j["r0"] = sr.tau.r0;
  j["coherence"] = {{"x", sr.coherence.x}, {"y", sr.coherence.y}};
  if (sr.xi_valid)
    j["xi"] = {{"diag", vec_of(sr.xi.diag)}, {"trace", sr.xi.trace}};
  else
    j["xi"] = nullptr;
  return j;
}

inline SteadyReport steady_from_json(const Json& j, int vq0, int vq1) {
  detail::reject_unknown(
      j, {"tau", "rho_I", "p_I", "gamma", "p_c", "rho_d", "r", "r0", "coherence", "xi"},
      "steady report");
  auto to_vec = [](const Json& a) {
    auto v = a.get<std::vector<double>>();
    return Eigen::Map<const RVec>(v.data(), v.size()).eval();
  };
  SteadyReport sr;
  sr.tau.populations = to_vec(j.at("tau"));
  sr.tau.P = sr.tau.populations(vq0) + sr.tau.populations(vq1);
  sr.tau.r0 = j.at("r0").get<double>();
  sr.rho_I.populations = to_vec(j.at("rho_I"));
  sr.rho_I.p_I = j.at("p_I").get<double>();
  sr.rho_I.d = 2.0 * sr.rho_I.populations(vq0);
  sr.rho_I.carnot_degenerate = std::abs(sr.tau.r0) < 1e-9;
  sr.carnot_degenerate = sr.rho_I.carnot_degenerate;
  sr.gamma = j.at("gamma").get<double>();
  sr.diag.p_c = j.at("p_c").get<double>();
  sr.diag.q = to_vec(j.at("rho_d"));
  sr.diag.r = j.at("r").get<double>();
  sr.diag.qsum = sr.diag.q(vq0) + sr.diag.q(vq1);
  sr.coherence.x = j.at("coherence").at("x").get<double>();
  sr.coherence.y = j.at("coherence").at("y").get<double>();
  if (!j.at("xi").is_null()) {
    sr.xi.diag = to_vec(j.at("xi").at("diag"));
    sr.xi.trace = j.at("xi").at("trace").get<double>();
    sr.xi_valid = true;
  }
  return sr;
}

inline Json to_json(const LabeledRates& rates) {
  Json j = Json::object();
  for (const auto& [label, v] : rates) j[label] = v;
  return j;
}

inline Json to_json(const TurReport& tr) {
  Json j;
  j["J_c"] = tr.J_c;
  j["J"] = to_json(tr.J);
  j["sigma"] = tr.sigma;
  j["var_d"] = to_json(tr.var_d);
  j["var_c"] = to_json(tr.var_c);
  j["Q_d"] = tr.Q_d;
  j["Q_c"] = tr.Q_c;
  j["Q"] = tr.Q;
  return j;
}

inline TurReport tur_from_json(const Json& j) {
  detail::reject_unknown(j, {"J_c", "J", "sigma", "var_d", "var_c", "Q_d", "Q_c", "Q"},
                         "tur report");
  TurReport tr;
  tr.J_c = j.at("J_c").get<double>();
  auto rates = [](const Json& o) {
    LabeledRates out;
    for (auto it = o.begin(); it != o.end(); ++it) out.push_back({it.key(), it.value()});
    return out;
  };
  tr.J = rates(j.at("J"));
  tr.sigma = j.at("sigma").get<double>();
  tr.var_d = rates(j.at("var_d"));
  tr.var_c = rates(j.at("var_c"));
  tr.Q_d = j.at("Q_d").get<double>();
  tr.Q_c = j.at("Q_c").get<double>();
  tr.Q = j.at("Q").get<double>();
  return tr;
}

inline Json to_json(const FcsResult& fr) {
  Json j;
  j["reservoir"] = fr.reservoir;
  j["chi_step"] = fr.chi_step;
  j["J_num"] = fr.J_num;
  j["Var_num"] = fr.Var_num;
  j["err_J"] = fr.err_J;
  j["err_Var"] = fr.err_Var;
  j["lambda_samples"] = Json::array();
  for (const auto& [chi, lam] : fr.lambda_samples) j["lambda_samples"].push_back({chi, lam});
  return j;
}

inline FcsResult fcs_from_json(const Json& j) {
  detail::reject_unknown(
      j, {"reservoir", "chi_step", "J_num", "Var_num", "err_J", "err_Var", "lambda_samples"},
      "fcs result");
  FcsResult fr;
  fr.reservoir = j.at("reservoir").get<std::string>();
  fr.chi_step = j.at("chi_step").get<double>();
  fr.J_num = j.at("J_num").get<double>();
  fr.Var_num = j.at("Var_num").get<double>();
  fr.err_J = j.at("err_J").get<double>();
  fr.err_Var = j.at("err_Var").get<double>();
  for (const auto& s : j.at("lambda_samples")) {
    auto pr = s.get<std::vector<double>>();
    if (pr.size() != 2) throw IoError("lambda_samples entries must be [chi, lambda] pairs");
    fr.lambda_samples.push_back({pr[0], pr[1]});
  }
  return fr;
}

inline ValidationReport validation_from_json(const Json& j) {
  detail::reject_unknown(j, {"passed", "checks"}, "validation report");
  ValidationReport rep;
  for (const auto& c : j.at("checks"))
    rep.checks.push_back({c.at("name").get<std::string>(), c.at("passed").get<bool>(),
                          c.at("detail").get<std::string>()});
  if (j.at("passed").get<bool>() != rep.all_passed())
    throw IoError("validation report summary contradicts its checks");
  return rep;
}

// CSV emitters. Column order is versioned in the leading comment line.

inline std::string oracle_csv(const std::vector<std::pair<double, double>>& samples) {
  std::ostringstream os;
  os.precision(17);
  os << "# turbox-oracle-v1 columns: chi,lambda\n";
  for (const auto& [chi, lam] : samples) os << chi << "," << lam << "\n";
  return os.str();
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows,
                             const std::vector<std::string>& param_names) {
  std::ostringstream os;
  os.precision(17);
  os << "# turbox-sweep-v1 columns: index";
  for (const auto& n : param_names) os << "," << n;
  os << ",r0,r,p_c,J_c,sigma,var_d,var_c,Q_d,Q_c,Q,flag\n";
  for (const auto& row : rows) {
    os << row.index;
    for (const auto& n : param_names) {
      auto it = row.params.find(n);
      os << ",";
      if (it != row.params.end()) os << it->second;
    }
    for (double v : {row.r0, row.r, row.p_c, row.J_c, row.sigma, row.var_d, row.var_c, row.Q_d,
                     row.Q_c, row.Q})
      os << "," << v;
    os << "," << row.flag << "\n";
  }
  return os.str();
}

/// Write-then-rename so readers never observe a half-written file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + tmp.string() + "' for writing");
    os << content;
    if (!os.flush()) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("failed to move '" + tmp.string() + "' into place: " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace turbox
