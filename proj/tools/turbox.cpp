// turbox: steady states, currents, uncertainty decomposition, counting-field
// oracle, parameter sweeps and optimization for virtual-qubit thermal
// machines. Batch tool: reads flags or a JSON config, writes JSON/CSV.

#include <iostream>

#include <CLI11.hpp>

#include "turbox/turbox.hpp"

namespace {

using turbox::Json;

struct ModelArgs {
  std::string family_name;
  std::string model_json;
  std::map<std::string, double> params;
};

// Union of the scalar flags understood by the model families; each family
// rejects names it does not define.
const std::vector<std::pair<std::string, std::string>> kScalarFlags = {
    {"--p", "p"},         {"--R", "R"},           {"--g", "g"},
    {"--delta", "delta"}, {"--r0", "r0"},         {"--r-over-r0", "r_over_r0"},
    {"--p0", "p0"},       {"--p1", "p1"},         {"--p2", "p2"},
    {"--p3", "p3"},       {"--R0", "R0"},         {"--R1", "R1"},
    {"--R2", "R2"},       {"--R3", "R3"},         {"--E0", "E0"},
    {"--E1", "E1"},       {"--E2", "E2"},         {"--omega-d", "omega_d"},
    {"--w1", "w1"},       {"--w3", "w3"},         {"--p-ratio", "p_ratio"},
};

void add_model_options(CLI::App* cmd, ModelArgs* args) {
  cmd->add_option("--model", args->family_name,
                  "model family: qubit|two-qubit|qutrit|fridge|qutrit-global");
  cmd->add_option("--model-json", args->model_json, "path to an inline model description");
  for (const auto& [flag, name] : kScalarFlags) {
    auto* opt = cmd->add_option_function<double>(
        flag, [args, n = name](double v) { args->params[n] = v; });
    opt->description("model parameter " + name);
  }
}

turbox::ModelSpec build_model(const ModelArgs& args) {
  if (!args.model_json.empty())
    return turbox::model_from_json(Json::parse(turbox::read_file(args.model_json)));
  if (args.family_name.empty())
    throw turbox::InvalidModel("specify --model <family> or --model-json <file>");
  return turbox::family(args.family_name).build(args.params);
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content << std::endl;
  else
    turbox::atomic_write(out_path, content);
}

std::vector<std::string> axis_param_names(const std::vector<turbox::GridAxis>& axes,
                                          const turbox::ParamMap& fixed) {
  std::vector<std::string> names;
  for (const auto& ax : axes) names.push_back(ax.name);
  for (const auto& [k, v] : fixed)
    if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
  return names;
}

int run(int argc, char** argv) {
  CLI::App app{"virtual-qubit thermal machine toolbox"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_path, format = "json", config_path, reservoir;
  double chi_max = 0.5;
  int scan_points = 20;
  std::uint64_t seed = 0;
  ModelArgs margs;

  app.add_option("--out", out_path, "output file (stdout if omitted)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "seed for optimizer starts");
  app.add_option("--config", config_path, "JSON run configuration");

  auto* c_validate = app.add_subcommand("validate", "check a model against the supported class");
  auto* c_steady = app.add_subcommand("steady", "solve tau, rho_I, rho_d, coherence and xi_d");
  auto* c_tur = app.add_subcommand("tur", "currents, entropy production and uncertainty");
  auto* c_oracle = app.add_subcommand("oracle", "counting-field cumulants and lambda(chi) scan");
  auto* c_sweep = app.add_subcommand("sweep", "grid sweep to CSV/JSON");
  auto* c_optimize = app.add_subcommand("optimize", "multi-start minimization of Q");

  for (auto* cmd : {c_validate, c_steady, c_tur, c_oracle}) add_model_options(cmd, &margs);
  c_oracle->add_option("--reservoir", reservoir, "reservoir label (default: first with n != 0)");
  c_oracle->add_option("--chi-max", chi_max, "scan half-range, in (0, 1]");
  c_oracle->add_option("--points", scan_points, "scan points per side");

  CLI11_PARSE(app, argc, argv);

  auto config = [&]() -> Json {
    if (config_path.empty()) throw turbox::InvalidModel("this subcommand needs --config");
    return Json::parse(turbox::read_file(config_path));
  };

  if (c_validate->parsed()) {
    auto rep = turbox::validate_model(build_model(margs));
    emit(out_path, turbox::to_json(rep).dump(2));
    return rep.all_passed() ? 0 : 2;
  }

  if (c_steady->parsed()) {
    auto m = build_model(margs);
    emit(out_path, turbox::to_json(turbox::solve_steady(m)).dump(2));
    return 0;
  }

  if (c_tur->parsed()) {
    auto m = build_model(margs);
    auto sr = turbox::solve_steady(m);
    emit(out_path, turbox::to_json(turbox::uncertainty(m, sr)).dump(2));
    return 0;
  }

  if (c_oracle->parsed()) {
    auto m = build_model(margs);
    if (reservoir.empty()) {
      auto counts = turbox::resolved_photon_counts(m);
      for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] != 0) {
          reservoir = m.reservoirs[i].label;
          break;
        }
      if (reservoir.empty()) reservoir = m.reservoirs.front().label;
    }
    if (format == "csv") {
      auto scan = turbox::lambda_scan(m, reservoir, chi_max, scan_points);
      emit(out_path, turbox::oracle_csv(scan));
    } else {
      emit(out_path, turbox::to_json(turbox::cumulants_numeric(m, reservoir)).dump(2));
    }
    return 0;
  }

  if (c_sweep->parsed()) {
    Json cfg = config();
    turbox::detail::reject_unknown(cfg, {"family", "fixed", "grid", "seed"}, "sweep config");
    const auto& fam = turbox::family(cfg.at("family").get<std::string>());
    turbox::ParamMap fixed;
    if (cfg.contains("fixed"))
      for (auto it = cfg["fixed"].begin(); it != cfg["fixed"].end(); ++it)
        fixed[it.key()] = it.value().get<double>();
    std::vector<turbox::GridAxis> axes;
    for (const auto& a : cfg.at("grid"))
      axes.push_back({a.at("name").get<std::string>(), a.at("values").get<std::vector<double>>()});
    auto rows = turbox::sweep(fam, axes, fixed);
    if (format == "csv") {
      emit(out_path, turbox::sweep_csv(rows, axis_param_names(axes, fixed)));
    } else {
      Json out = Json::array();
      for (const auto& row : rows) {
        Json r{{"index", row.index}, {"r0", row.r0},       {"r", row.r},
               {"p_c", row.p_c},     {"J_c", row.J_c},     {"sigma", row.sigma},
               {"var_d", row.var_d}, {"var_c", row.var_c}, {"Q_d", row.Q_d},
               {"Q_c", row.Q_c},     {"Q", row.Q},         {"flag", row.flag}};
        for (const auto& [k, v] : row.params) r["params"][k] = v;
        out.push_back(r);
      }
      emit(out_path, out.dump(2));
    }
    return 0;
  }

  if (c_optimize->parsed()) {
    Json cfg = config();
    turbox::detail::reject_unknown(cfg, {"family", "fixed", "free", "seed"}, "optimize config");
    const auto& fam = turbox::family(cfg.at("family").get<std::string>());
    turbox::ParamMap fixed;
    if (cfg.contains("fixed"))
      for (auto it = cfg["fixed"].begin(); it != cfg["fixed"].end(); ++it)
        fixed[it.key()] = it.value().get<double>();
    std::vector<std::string> free;
    std::vector<double> lo, hi;
    for (const auto& f : cfg.at("free")) {
      free.push_back(f.at("name").get<std::string>());
      lo.push_back(f.at("min").get<double>());
      hi.push_back(f.at("max").get<double>());
    }
    std::uint64_t run_seed = cfg.contains("seed") ? cfg["seed"].get<std::uint64_t>() : seed;
    auto res = turbox::minimize_Q(fam, free,
                                  Eigen::Map<const turbox::RVec>(lo.data(), lo.size()),
                                  Eigen::Map<const turbox::RVec>(hi.data(), hi.size()),
                                  run_seed, fixed);
    Json out;
    out["Q"] = res.Q;
    out["params"] = Json::object();
    for (const auto& [k, v] : res.best) out["params"][k] = v;
    out["report"] = turbox::to_json(res.report);
    out["findings"] = res.findings;
    out["seed"] = run_seed;
    Json starts = Json::array();
    for (const auto& [params, q] : res.starts) {
      Json s{{"Q", q}};
      for (const auto& [k, v] : params) s["params"][k] = v;
      starts.push_back(s);
    }
    out["starts"] = starts;
    emit(out_path, out.dump(2));
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const turbox::IoError& e) {
    std::cerr << Json{{"error", {{"type", "io"}, {"message", e.what()}}}}.dump() << std::endl;
    return 1;
  } catch (const turbox::Error& e) {
    std::cerr << Json{{"error", {{"type", "model"}, {"message", e.what()}}}}.dump() << std::endl;
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << Json{{"error", {{"type", "config"}, {"message", e.what()}}}}.dump() << std::endl;
    return 2;
  }
}
