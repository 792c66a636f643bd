// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code next to each check.

#include <cstdio>
#include <functional>
#include <vector>

#include "testutil.hpp"

using namespace turbox;

namespace {

int g_failures = 0;

void report(int idx, const std::string& name, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", idx, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

struct Batch {
  ModelSpec model;
  SteadyReport steady;
  TurReport tur;
};

std::vector<Batch> sample_batch(int count, std::uint64_t seed) {
  std::vector<Batch> out;
  Rng rng(seed);
  for (int k = 0; k < count; ++k) {
    Batch b;
    b.model = tu::sample_model(k, rng);
    b.steady = solve_steady(b.model);
    b.tur = uncertainty(b.model, b.steady);
    out.push_back(std::move(b));
  }
  return out;
}

// 1. closed-form currents and variances against the counting-field oracle
void criterion1(const std::vector<Batch>& batch) {
  double worstJ = 0.0, worstV = 0.0;
  for (const auto& b : batch) {
    auto counts = resolved_photon_counts(b.model);
    for (std::size_t i = 0; i < b.model.reservoirs.size(); ++i) {
      if (counts[i] == 0) continue;
      auto fc = cumulants_numeric(b.model, b.model.reservoirs[i].label);
      double J = b.tur.J[i].second;
      double V = b.tur.var_d[i].second + b.tur.var_c[i].second;
      worstJ = std::max(worstJ, std::abs(fc.J_num - J) / std::abs(J));
      worstV = std::max(worstV, std::abs(fc.Var_num - V) / std::abs(V));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "100 models, worst rel dJ=%.2e (tol 1e-6), dVar=%.2e (tol 1e-5)",
                worstJ, worstV);
  report(1, "oracle equivalence", worstJ <= 1e-6 && worstV <= 1e-5, buf);
}

// 2. classical counterpart reproduces rho_d and Q_d
void criterion2(const std::vector<Batch>& batch) {
  double worstState = 0.0, worstQ = 0.0;
  for (const auto& b : batch) {
    ModelSpec cp = classical_counterpart(b.model);
    ThermalState cps = thermal_fixed_point(cp);
    worstState = std::max(worstState,
                          (cps.populations - b.steady.diag.q).cwiseAbs().maxCoeff());
    Mat rho = Mat::Zero(cp.dim, cp.dim);
    rho.diagonal() = cps.populations.cast<Complex>();
    double sigma = 0.0;
    for (const auto& res : cp.reservoirs)
      sigma += detail::jump_current(res, rho) * std::log(res.Rbar() / res.R);
    auto counts = resolved_photon_counts(b.model);
    for (std::size_t i = 0; i < b.model.reservoirs.size(); ++i) {
      if (counts[i] == 0) continue;
      auto ex = cumulants_exact(cp, b.model.reservoirs[i].label, rho);
      double Qcp = sigma * ex.Var / (ex.J * ex.J);
      worstQ = std::max(worstQ, std::abs(Qcp - b.tur.Q_d) / std::abs(b.tur.Q_d));
      break;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "worst state mismatch %.2e (tol 1e-10), worst rel dQ_d %.2e (tol 1e-8)",
                worstState, worstQ);
  report(2, "classical-counterpart equivalence", worstState <= 1e-10 && worstQ <= 1e-8, buf);
}

// 3. driven qubit: optimum location, violation window, near-Carnot coefficient
void criterion3() {
  const auto& fam = family("qubit");
  bool ok = true;
  std::string detail;

  RVec lo(2), hi(2);
  lo << 0.05, 0.05;
  hi << 0.995, 0.95;
  auto res = minimize_Q(fam, {"r0", "r_over_r0"}, lo, hi, 2026, {{"p", 1.0}});
  double r0_opt = res.best.at("r0"), x_opt = res.best.at("r_over_r0");
  bool a = std::abs(r0_opt - 0.947) <= 0.002 && std::abs(x_opt - 0.5) <= 1e-3 && res.Q < 2.0;
  ok = ok && a;

  auto q_at = [&](double x) {
    auto m = fam.build({{"p", 1.0}, {"r0", 0.01}, {"r_over_r0", x}, {"delta", 0.0}});
    auto sr = solve_steady(m, SteadyOptions{false});
    return uncertainty(m, sr).Q;
  };
  auto bisect = [&](double a0, double b0) {
    double fa = q_at(a0) - 2.0;
    for (int i = 0; i < 80; ++i) {
      double mid = 0.5 * (a0 + b0), fm = q_at(mid) - 2.0;
      if ((fa > 0) == (fm > 0)) {
        a0 = mid;
        fa = fm;
      } else {
        b0 = mid;
      }
    }
    return 0.5 * (a0 + b0);
  };
  double xl = bisect(0.02, 0.5), xr = bisect(0.5, 0.99);
  double el = (3.0 - std::sqrt(5.0)) / 6.0, er = (3.0 + std::sqrt(5.0)) / 6.0;
  bool b = std::abs(xl - el) / el <= 1e-2 && std::abs(xr - er) / er <= 1e-2;
  ok = ok && b;

  double coeff = 2.0 * carnot_criterion(fam, {{"p", 1.0}});
  bool c = std::abs(coeff - (-5.0 / 6.0)) <= 1e-3;
  ok = ok && c;

  char buf[220];
  std::snprintf(buf, sizeof buf,
                "(a) r0*=%.4f x*=%.4f Q=%.4f | (b) window [%.5f, %.5f] | (c) coeff %.6f",
                r0_opt, x_opt, res.Q, xl, xr, coeff);
  report(3, "driven qubit optimum, window, near-Carnot", ok, buf);
}

// 4. two-qubit transport: printed optima and near-Carnot coefficient
void criterion4() {
  const auto& fam = family("two-qubit");
  double r0 = 0.835;
  auto m1 = fam.build({{"p1", 1.0}, {"p2", 1.0}, {"R1", (1 + r0) / 2}, {"R2", (1 - r0) / 2},
                       {"r_over_r0", 3.0 / 8.0}});
  auto sr1 = solve_steady(m1);
  double Q1 = uncertainty(m1, sr1).Q;

  double r0b = 0.259;
  auto m2 = fam.build({{"p1", 1.0}, {"p2", 1.0}, {"R1", 0.5}, {"R2", 0.5 - r0b},
                       {"r_over_r0", 3.0 / 8.0}});
  auto sr2 = solve_steady(m2);
  double Q2 = uncertainty(m2, sr2).Q;

  double coeff = 2.0 * carnot_criterion(fam, {{"p1", 1.0}, {"p2", 1.0}, {"R1", 0.5}});
  bool ok = std::abs(Q1 - 1.76) <= 0.01 && std::abs(Q2 - 1.98) <= 0.01 &&
            std::abs(coeff - (-11.0 / 24.0)) <= 1e-3;
  char buf[160];
  std::snprintf(buf, sizeof buf, "Q(0.835)=%.4f Q(0.259)=%.4f coeff=%.6f (-11/24=%.6f)", Q1, Q2,
                coeff, -11.0 / 24.0);
  report(4, "two-qubit transport optima and near-Carnot", ok, buf);
}

// 5. driven qutrit: quoted optima and the violation threshold
void criterion5() {
  const auto& fam = family("qutrit");
  auto quoted = fam.build({{"p0", 1.0}, {"p_ratio", 0.83}, {"R0", 0.946}, {"R1", 0.129},
                           {"r_over_r0", 0.421}, {"delta", 0.0}});
  auto srq = solve_steady(quoted);
  double Qq = uncertainty(quoted, srq).Q;
  bool a = std::abs(Qq - 1.549) <= 0.002;

  RVec lo(4), hi(4);
  lo << 0.05, 0.02, 0.02, 0.05;
  hi << 1.0, 0.98, 0.98, 0.95;
  auto res = minimize_Q(fam, {"p_ratio", "R0", "R1", "r_over_r0"}, lo, hi, 2026, {{"p0", 1.0}});
  bool b = res.Q >= Qq - 1e-3 && std::abs(res.Q - Qq) <= 2e-3;

  RVec lo_up(4), hi_up(4);
  lo_up << 0.05, 0.5, 0.5, 0.05;
  hi_up << 1.0, 0.995, 0.995, 0.95;
  auto up = minimize_Q(fam, {"p_ratio", "R0", "R1", "r_over_r0"}, lo_up, hi_up, 2027,
                       {{"p0", 1.0}});
  RVec lo_dn(4), hi_dn(4);
  lo_dn << 0.05, 0.005, 0.005, 0.05;
  hi_dn << 1.0, 0.5, 0.5, 0.95;
  auto dn = minimize_Q(fam, {"p_ratio", "R0", "R1", "r_over_r0"}, lo_dn, hi_dn, 2028,
                       {{"p0", 1.0}});
  double Qconstrained = std::min(up.Q, dn.Q);
  bool c = std::abs(Qconstrained - 1.618) <= 0.002;

  auto delta_min = [&](double R) {
    return 2.0 * carnot_criterion(fam, {{"p0", 1.0}, {"p1", 1.0}, {"R1", R}});
  };
  double a0 = 0.15, b0 = 0.4, fa = delta_min(a0);
  for (int i = 0; i < 50; ++i) {
    double mid = 0.5 * (a0 + b0), fm = delta_min(mid);
    if ((fa > 0) == (fm > 0)) {
      a0 = mid;
      fa = fm;
    } else {
      b0 = mid;
    }
  }
  double threshold = 0.5 * (a0 + b0);
  bool d = std::abs(threshold - 0.244) <= 0.002;

  char buf[220];
  std::snprintf(buf, sizeof buf,
                "Q(quoted)=%.4f search min=%.4f constrained=%.4f threshold R=%.4f", Qq, res.Q,
                Qconstrained, threshold);
  report(5, "driven qutrit optima and threshold", a && b && c && d, buf);
}

// 6. three-qubit refrigerator: no violation on a grid; delta_min location
void criterion6() {
  const auto& fam = family("fridge");
  std::vector<GridAxis> axes = {
      {"p2", {0.3, 0.65, 1.0}},
      {"p3", {0.3, 0.65, 1.0}},
      {"R1", {0.2, 0.35, 0.5, 0.65, 0.8}},
      {"R2", {0.2, 0.35, 0.5, 0.65, 0.8}},
      {"R3", {0.2, 0.35, 0.5, 0.65, 0.8}},
      {"r_over_r0", {0.2, 0.4, 0.6, 0.8}},
  };
  auto rows = sweep(fam, axes, {{"p1", 1.0}});
  double minQ = std::numeric_limits<double>::infinity();
  std::size_t evaluated = 0;
  for (const auto& row : rows)
    if (row.flag == "ok") {
      minQ = std::min(minQ, row.Q);
      ++evaluated;
    }
  bool a = minQ >= 2.0 - 1e-3;

  auto delta_obj = [&](const RVec& v) -> double {
    try {
      return 2.0 * carnot_criterion(fam, {{"p1", 1.0}, {"p2", v(0)}, {"p3", v(1)},
                                          {"R2", v(2)}, {"R3", v(3)}});
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  RVec lo(4), hi(4), x0(4);
  lo << 0.05, 0.05, 0.2, 0.2;
  hi << 1.5, 1.5, 0.8, 0.8;
  x0 << 0.5, 0.5, 0.4, 0.4;
  auto opt = nelder_mead(delta_obj, x0, lo, hi, 400, 1e-9);
  bool b = std::abs(opt.value - 1.21) <= 0.02 && std::abs(opt.x(0) - 0.26) <= 0.01 &&
           std::abs(opt.x(1) - 0.26) <= 0.01 && std::abs(opt.x(2) - 0.5) <= 0.02 &&
           std::abs(opt.x(3) - 0.5) <= 0.02;

  char buf[220];
  std::snprintf(buf, sizeof buf,
                "grid min Q=%.5f over %zu points | delta_min=%.4f at p2=%.3f p3=%.3f R=(%.3f,%.3f)",
                minQ, evaluated, opt.value, opt.x(0), opt.x(1), opt.x(2), opt.x(3));
  report(6, "refrigerator bound and delta_min", a && b, buf);
}

// 7. invariant suite over the sampled batch
void criterion7(const std::vector<Batch>& batch) {
  bool ok = true;
  std::vector<std::string> findings;
  double worstIndep = 0.0;
  for (const auto& b : batch) {
    if (!(b.tur.sigma >= 0.0)) ok = false;
    if (!(b.tur.Q_d >= 2.0 - 1e-8)) ok = false;
    double delta = b.model.detuning();
    bool resonant = delta * delta < b.steady.gamma * b.steady.gamma;
    if (std::abs(b.tur.J_c) > 1e-12 && (b.tur.Q_c < 0.0) != resonant) ok = false;

    Mat rho = tu::density_from(b.steady, b.model);
    auto counts = resolved_photon_counts(b.model);
    double Qref = std::nan("");
    for (std::size_t i = 0; i < b.model.reservoirs.size(); ++i) {
      if (counts[i] == 0) continue;
      auto ex = cumulants_exact(b.model, b.model.reservoirs[i].label, rho);
      double Qi = b.tur.sigma * ex.Var / (ex.J * ex.J);
      if (std::isnan(Qref))
        Qref = Qi;
      else
        worstIndep = std::max(worstIndep, std::abs(Qi - Qref) / std::abs(Qref));
    }
  }
  if (worstIndep > 1e-8) ok = false;

  // zero-photon channel: the generating function itself vanishes
  double worstLambda = 0.0, worstJ0 = 0.0;
  for (double g : {0.15, 0.3}) {
    ModelSpec m = tu::spectator_model(g);
    auto fc = cumulants_numeric(m, "spectator");
    for (const auto& [chi, lam] : fc.lambda_samples)
      worstLambda = std::max(worstLambda, std::abs(lam));
    for (const auto& [chi, lam] : lambda_scan(m, "spectator", 0.5, 5))
      worstLambda = std::max(worstLambda, std::abs(lam));
    worstJ0 = std::max(worstJ0, std::abs(fc.J_num));
    if (std::abs(fc.Var_num) > fc.err_Var + 1e-10) ok = false;
  }
  if (worstLambda > 1e-10 || worstJ0 > 1e-10) ok = false;

  // conjecture check on the optimal coupling, per family: findings only
  struct FamilyBase {
    std::string fam;
    ParamMap base;
  };
  for (const auto& fb : std::vector<FamilyBase>{
           {"qubit", {{"p", 1.0}, {"R", 0.8}}},
           {"two-qubit", {{"p1", 1.0}, {"p2", 0.7}, {"R1", 0.8}, {"R2", 0.3}}},
           {"qutrit", {{"p0", 1.0}, {"p1", 0.7}, {"R0", 0.7}, {"R1", 0.2}}},
           {"fridge",
            {{"p1", 1.0}, {"p2", 0.8}, {"p3", 0.9}, {"R1", 0.6}, {"R2", 0.4}, {"R3", 0.55}}}}) {
    auto prof = quadratic_profile(family(fb.fam), fb.base);
    if (!(prof.A1 < 0.0))
      findings.push_back(fb.fam + ": A1 >= 0, extremum is a maximum");
    if (!(prof.r_star > 0.0 && prof.r_star <= 0.5 * prof.r0 + 1e-12))
      findings.push_back(fb.fam + ": r* outside (0, r0/2]");
    double pc_over_pI = (prof.r0 - prof.r_star) / prof.r_star;
    if (!(pc_over_pI > 0.0 && pc_over_pI <= 1.0 + 1e-12))
      findings.push_back(fb.fam + ": p_c/p_I = " + std::to_string(pc_over_pI) +
                         " outside (0, 1] (r-form of the conjecture still holds)");
  }

  char buf[220];
  std::snprintf(buf, sizeof buf,
                "reservoir independence %.2e (tol 1e-8), zero-photon |lambda| %.2e (tol 1e-10), "
                "%zu conjecture findings",
                worstIndep, worstLambda, findings.size());
  report(7, "invariant suite", ok, buf);
  for (const auto& f : findings) std::printf("         finding: %s\n", f.c_str());
}

// 8. global-approach mapping equals direct dressed-frame evaluation
void criterion8() {
  Rng rng(808);
  double worst = 0.0;
  int done = 0;
  while (done < 50) {
    std::array<double, 3> E{rng.uniform(0.5, 2.0), rng.uniform(-1.0, 0.5),
                            rng.uniform(-0.3, 0.3)};
    double g = rng.uniform(0.05, 0.45), wd = rng.uniform(0.3, 1.6);
    double p0 = rng.uniform(0.5, 1.5), p1 = rng.uniform(0.5, 1.5);
    double R0 = rng.uniform(0.08, 0.92), R1 = rng.uniform(0.08, 0.92);
    try {
      auto [gm, local] = zoo::global_to_local(E, g, wd, p0, p1, R0, R1);
      auto sr = solve_steady(local, SteadyOptions{false});
      if (sr.carnot_degenerate || std::abs(sr.tau.r0) < 0.05) continue;
      double Q1 = uncertainty(local, sr).Q;
      auto direct = zoo::driven_qutrit(gm.eps, p0, p1, R0, R1, gm.g_tilde, gm.omega_d_eff);
      auto sr2 = solve_steady(direct, SteadyOptions{false});
      double Q2 = uncertainty(direct, sr2).Q;
      worst = std::max(worst, std::abs(Q1 - Q2) / std::abs(Q2));
      ++done;
    } catch (const Error&) {
      continue;
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "50 triples, worst rel dQ = %.2e (tol 1e-8)", worst);
  report(8, "global mapping", worst <= 1e-8, buf);
}

}  // namespace

int main() {
  std::printf("turbox acceptance suite\n");
  auto batch = sample_batch(100, 20260810);
  criterion1(batch);
  criterion2(batch);
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7(batch);
  criterion8();
  if (g_failures == 0)
    std::printf("all criteria passed\n");
  else
    std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures;
}
