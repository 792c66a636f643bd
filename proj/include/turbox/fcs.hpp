#pragma once

#include <array>

#include "turbox/tur.hpp"

namespace turbox {

struct FcsResult {
  std::string reservoir;
  double chi_step = 0.0;  // base counting-field step
  double J_num = 0.0;
  double Var_num = 0.0;
  double err_J = 0.0;    // extrapolation residual
  double err_Var = 0.0;  // extrapolation residual
  std::vector<std::pair<double, double>> lambda_samples;
};

namespace detail {

inline Complex matrix_trace_of(const Vec& w, int dim) {
  Complex t = 0.0;
  for (int k = 0; k < dim; ++k) t += w(k * dim + k);
  return t;
}

/// Two-sided inverse-iteration refinement of an approximate eigenpair. Dense
/// QR eigenvalues of these non-normal generators carry O(1e-13) noise, which
/// the finite-difference cumulants amplify by 1/h^2; two correction sweeps
/// push the eigenvalue to the rounding floor.
inline Complex refine_eigenvalue(const Mat& S, Complex lam, Vec x) {
  Vec y = x;
  const Mat id = Mat::Identity(S.rows(), S.cols());
  for (int it = 0; it < 2; ++it) {
    Eigen::PartialPivLU<Mat> lu(S - lam * id);
    Vec xn = lu.solve(x);
    if (xn.allFinite() && xn.norm() > 0) x = xn.normalized();
    Vec yn = lu.adjoint().solve(y);
    if (yn.allFinite() && yn.norm() > 0) y = yn.normalized();
    Complex denom = y.dot(x);
    if (std::abs(denom) < 1e-8) break;
    Complex corr = (y.dot(S * x) - lam * denom) / denom;
    if (!std::isfinite(corr.real()) || !std::isfinite(corr.imag())) break;
    lam += corr;
  }
  return lam;
}

struct DominantEig {
  Complex lambda;
  double gap = 0.0;  // modulus distance to the nearest other eigenvalue
  int index = 0;
  Vec all_values;
};

inline DominantEig dominant_eig_full(const Mat& S, const Complex* reference = nullptr) {
  Eigen::ComplexEigenSolver<Mat> es(S);
  if (es.info() != Eigen::Success) throw GapCollapse("eigen-decomposition failed");
  const auto& vals = es.eigenvalues();
  int pick = 0;
  if (reference) {
    for (int i = 1; i < vals.size(); ++i)
      if (std::abs(vals(i) - *reference) < std::abs(vals(pick) - *reference)) pick = i;
  } else {
    for (int i = 1; i < vals.size(); ++i)
      if (vals(i).real() > vals(pick).real()) pick = i;
  }
  // The tracked branch must still dominate the spectrum.
  for (int i = 0; i < vals.size(); ++i)
    if (vals(i).real() > vals(pick).real() + 1e-9)
      throw GapCollapse("tracked eigenvalue is no longer dominant");
  double gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < vals.size(); ++i)
    if (i != pick) gap = std::min(gap, std::abs(vals(i) - vals(pick)));
  if (gap < 1e-8) throw GapCollapse("spectral gap below 1e-8, eigenvalue tracking unreliable");
  DominantEig out;
  out.lambda = refine_eigenvalue(S, vals(pick), es.eigenvectors().col(pick));
  out.gap = gap;
  out.index = pick;
  out.all_values = vals;
  return out;
}

}  // namespace detail

/// Eigenvalue of a tilted generator with the largest real part. Asserts a
/// finite spectral gap and a negligible imaginary part.
inline double dominant_eigenvalue(const Mat& S) {
  auto de = detail::dominant_eig_full(S);
  if (std::abs(de.lambda.imag()) > kTolAbs)
    throw GapCollapse("dominant eigenvalue has imaginary part " + std::to_string(de.lambda.imag()));
  return de.lambda.real();
}

/// Current and variance for one reservoir from central differences of the
/// dominant eigenvalue, Richardson-extrapolated over the fixed step ladder
/// {1e-3, 5e-4, 2.5e-4}. The extrapolation level is picked adaptively so a
/// noise-dominated finer step cannot degrade the estimate.
inline FcsResult cumulants_numeric(const ModelSpec& m, const std::string& label) {
  const std::array<double, 3> steps{1e-3, 5e-4, 2.5e-4};
  FcsResult out;
  out.reservoir = label;
  out.chi_step = steps[0];

  auto lam = [&](double chi) { return dominant_eigenvalue(tilted_liouvillian(m, label, chi)); };
  double l0 = lam(0.0);
  if (std::abs(l0) > kTolAbs)
    throw GapCollapse("lambda(0) = " + std::to_string(l0) + " is not zero");
  out.lambda_samples.push_back({0.0, l0});

  std::array<double, 3> lp{}, lm{};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    lp[i] = lam(steps[i]);
    lm[i] = lam(-steps[i]);
    out.lambda_samples.push_back({steps[i], lp[i]});
    out.lambda_samples.push_back({-steps[i], lm[i]});
  }
  std::sort(out.lambda_samples.begin(), out.lambda_samples.end());

  auto richardson = [](const std::array<double, 3>& d, double* err) {
    // Error series in h^2 with h halved at each level.
    std::array<std::array<double, 3>, 3> t{};
    for (int i = 0; i < 3; ++i) t[i][0] = d[i];
    for (int j = 1; j < 3; ++j) {
      double f = std::pow(4.0, j);
      for (int i = j; i < 3; ++i) t[i][j] = (f * t[i][j - 1] - t[i - 1][j - 1]) / (f - 1.0);
    }
    double err1 = std::abs(t[1][1] - t[0][0]);
    double err2 = std::abs(t[2][2] - t[1][1]);
    if (err2 <= err1) {
      *err = err2;
      return t[2][2];
    }
    *err = err1;
    return t[1][1];
  };

  std::array<double, 3> d1{}, d2{};
  for (int i = 0; i < 3; ++i) {
    d1[i] = (lp[i] - lm[i]) / (2.0 * steps[i]);
    d2[i] = (lp[i] - 2.0 * l0 + lm[i]) / (steps[i] * steps[i]);
  }
  out.J_num = richardson(d1, &out.err_J);
  out.Var_num = richardson(d2, &out.err_Var);
  return out;
}

struct ExactCumulants {
  double J = 0.0;
  double Var = 0.0;
};

/// Deterministic perturbative cumulants: J = Tr(L1 rho), and the variance via
/// the generalized inverse of L0 on the traceless subspace. Shares nothing
/// with the xi_d route beyond the generator itself.
inline ExactCumulants cumulants_exact(const ModelSpec& m, const std::string& label,
                                      const Mat& rho_ss) {
  const int d = m.dim;
  Mat L0 = assemble_liouvillian(m);
  Mat L1 = counting_first_order(m, label);
  Mat L2 = counting_second_order(m, label);
  Vec rho = vec(rho_ss);
  // The perturbative hierarchy is anchored on the stationary state; anything
  // else silently yields wrong cumulants, so verify up front.
  if ((L0 * rho).norm() > 1e-8 * (1.0 + rho.norm()))
    throw CrossCheckFailure("cumulants_exact requires the steady state");

  Vec l1rho = L1 * rho;
  double J = detail::matrix_trace_of(l1rho, d).real();

  const int n = d * d;
  Mat A(n + 1, n);
  A.topRows(n) = L0;
  A.row(n) = trace_vector(d).transpose();
  Vec b(n + 1);
  b.head(n) = J * rho - l1rho;
  b(n) = 0.0;
  Vec r1 = A.colPivHouseholderQr().solve(b);
  if ((A * r1 - b).norm() > 1e-8 * (1.0 + b.norm()))
    throw CrossCheckFailure("perturbative linear system is inconsistent; state not steady?");

  double var = (detail::matrix_trace_of(L2 * rho, d) +
                2.0 * detail::matrix_trace_of(L1 * r1, d))
                   .real();
  return {J, var};
}

/// lambda(chi) on a symmetric grid, tracked by nearest-eigenvalue
/// continuation from chi = 0 outward.
inline std::vector<std::pair<double, double>> lambda_scan(const ModelSpec& m,
                                                          const std::string& label,
                                                          double chi_max, int points_per_side) {
  if (!(chi_max > 0) || chi_max > 1.0)
    throw InvalidModel("counting-field range must lie in (0, 1]");
  if (points_per_side < 1) throw InvalidModel("need at least one scan point per side");
  std::vector<std::pair<double, double>> out;
  auto march = [&](double sign) {
    Complex ref = 0.0;
    for (int k = 1; k <= points_per_side; ++k) {
      double chi = sign * chi_max * k / points_per_side;
      auto de = detail::dominant_eig_full(tilted_liouvillian(m, label, chi), &ref);
      if (std::abs(de.lambda.imag()) > kTolAbs)
        throw GapCollapse("lambda became complex at chi = " + std::to_string(chi));
      ref = de.lambda;
      out.push_back({chi, de.lambda.real()});
    }
  };
  march(-1.0);
  out.push_back({0.0, dominant_eigenvalue(assemble_liouvillian(m))});
  march(+1.0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace turbox
