#include "henon/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "henon/error.hpp"
#include "henon/functional.hpp"
#include "henon/simd/kernels.hpp"

namespace henon {

SignChange sign_change(const Field& u, const Weights& weights, const Field* e1, double tol) {
  const double scale = u.max_abs();
  if (scale == 0.0) throw ConfigError("sign test is undefined for the zero field");
  SignChange out;
  const auto vals = u.values();
  out.min = *std::min_element(vals.begin(), vals.end());
  out.max = *std::max_element(vals.begin(), vals.end());
  out.changes_sign = out.min < -tol * scale && out.max > tol * scale;
  if (e1 != nullptr) out.e1_projection = l2_inner(u, *e1, weights);
  return out;
}

MorseResult morse_index(const Field& u, const Problem& p, int k, double grad_tol) {
  if (k < 1) throw ConfigError("Morse index needs k >= 1");
  require_same_grid(*u.grid(), *p.grid);
  const double scale = std::max(1.0, h_norm(u, p));
  const double gn = h_norm(h_gradient(u, p), p);
  if (gn > grad_tol * scale) {
    throw ConfigError("Morse index requested at a non-critical field (gradient " +
                      std::to_string(gn) + ")");
  }

  // S = B^{1/2} K^{-1} B^{1/2}, B = W(λ + (2*−1)|x|^α|u|^{2*−2}) on the unknowns
  const std::size_t n = p.grid->interior_size();
  std::vector<double> q(u.size());
  simd::active_kernels().abs_pow(u.data(), p.r_alpha.data(), p.crit_exp() - 2.0, q.data(),
                                 u.size());
  Eigen::VectorXd bh(n);
  for (std::size_t i = 0; i < n; ++i) {
    bh[i] = std::sqrt(p.weights.w[i] * (p.spec.lambda + (p.crit_exp() - 1.0) * q[i]));
  }
  const auto apply = [&](const Eigen::VectorXd& x) {
    Field b(p.grid);
    for (std::size_t i = 0; i < n; ++i) b[i] = bh[i] * x[i];
    const Field y = p.op.solve_stiffness(b);
    Eigen::VectorXd out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = bh[i] * y[i];
    return out;
  };

  MorseResult res;
  res.eps_morse = 1e-6;  // Hessian = I − compact, its positive part has unit scale
  const int kk = std::min<int>(k, static_cast<int>(n));
  const int max_steps = std::min<int>(static_cast<int>(n), std::max(4 * kk + 40, 80));

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd V(n, max_steps + 1);
  Eigen::VectorXd x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = nd(rng);
  V.col(0) = x / x.norm();
  std::vector<double> alpha, beta;
  Eigen::VectorXd taus;
  for (int j = 0; j < max_steps; ++j) {
    Eigen::VectorXd w = apply(V.col(j));
    alpha.push_back(V.col(j).dot(w));
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    const double b = w.norm();
    res.lanczos_steps = j + 1;

    const int m = j + 1;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int a = 0; a < m; ++a) T(a, a) = alpha[a];
    for (int a = 0; a + 1 < m; ++a) T(a, a + 1) = T(a + 1, a) = beta[a];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    taus = es.eigenvalues();
    const double tscale = std::max(std::abs(taus[m - 1]), 1.0);
    bool done = m >= kk;
    for (int t = 0; t < std::min(kk, m) && done; ++t) {
      if (std::abs(b * es.eigenvectors()(m - 1, m - 1 - t)) > 1e-10 * tscale) done = false;
    }
    // b ≈ 0: the Krylov space is invariant and T holds every nonzero τ
    if (done || b <= 1e-14 * tscale || m == static_cast<int>(n)) break;
    if (j + 1 == max_steps) throw NumericalError("Morse Lanczos did not converge", j + 1, b);
    beta.push_back(b);
    V.col(j + 1) = w / b;
  }

  const int m = static_cast<int>(taus.size());
  for (int t = 0; t < std::min(kk, m); ++t) res.hessian_eigs.push_back(1.0 - taus[m - 1 - t]);
  while (static_cast<int>(res.hessian_eigs.size()) < kk) res.hessian_eigs.push_back(1.0);
  std::sort(res.hessian_eigs.begin(), res.hessian_eigs.end());
  for (double e : res.hessian_eigs) {
    if (e < -res.eps_morse) ++res.index;
    if (std::abs(e) <= 100.0 * res.eps_morse) res.ambiguous = true;
  }
  if (res.index == kk) res.ambiguous = true;
  return res;
}

Field reflect_theta(const Field& u) {
  const Grid& g = *u.grid();
  Field out(u.grid());
  const int nt = g.ntheta();
  for (int i = 0; i < g.nr(); ++i) {
    for (int j = 0; j < nt; ++j) out(i, j) = u(i, nt - 1 - j);
  }
  return out;
}

Field polarize_equatorial(const Field& u) {
  const Grid& g = *u.grid();
  if (g.ntheta() % 2 != 0) throw ConfigError("polarization needs an even ntheta");
  Field out(u.grid());
  const int nt = g.ntheta();
  for (int i = 0; i < g.nr(); ++i) {
    for (int j = 0; j < nt / 2; ++j) {
      const double a = u(i, j);
      const double b = u(i, nt - 1 - j);
      out(i, j) = std::max(a, b);
      out(i, nt - 1 - j) = std::min(a, b);
    }
  }
  return out;
}

MonotoneDefect theta_monotonicity(const Field& u) {
  const Grid& g = *u.grid();
  double up = 0.0;
  double down = 0.0;
  for (int i = 0; i < g.nr(); ++i) {
    double su = 0.0;
    double sd = 0.0;
    for (int j = 0; j + 1 < g.ntheta(); ++j) {
      const double d = u(i, j + 1) - u(i, j);
      if (d > 0.0) su += d;
      else sd -= d;
    }
    up = std::max(up, su);
    down = std::max(down, sd);
  }
  MonotoneDefect out;
  out.nonincreasing = up <= down;
  out.defect = out.nonincreasing ? up : down;
  return out;
}

double InvarianceGap::gap() const { return std::abs(after - before); }

double InvarianceGap::relative() const {
  const double s = std::max(std::abs(before), std::abs(after));
  return s == 0.0 ? 0.0 : gap() / s;
}

double SymmetryReport::max_relative_gap() const {
  return std::max({dirichlet.relative(), l2.relative(), lcrit.relative(), e1.relative(),
                   nl_e1.relative()});
}

SymmetryReport polarization_invariants(const Field& u, const Problem& p, const Field& e1) {
  require_same_grid(*u.grid(), *p.grid);
  const Field uk = polarize_equatorial(u);
  const double q = p.crit_exp();
  const auto nl_e1 = [&](const Field& f) {
    std::vector<double> nl(f.size());
    simd::active_kernels().signed_pow(f.data(), p.r_alpha.data(), q - 2.0, nl.data(), f.size());
    return simd::active_kernels().dot3(nl.data(), e1.data(), p.weights.w.data(), f.size());
  };

  SymmetryReport r;
  const double scale = std::max(u.max_abs(), 1e-300);
  r.theta_monotone_defect = theta_monotonicity(u).defect / scale;
  r.energy = {energy(u, p).phi, energy(uk, p).phi};
  r.dirichlet = {h_inner(u, u, p.weights), h_inner(uk, uk, p.weights)};
  r.l2 = {l2_inner(u, u, p.weights), l2_inner(uk, uk, p.weights)};
  r.lcrit = {weighted_power_integral(u, q, 0.0, p.weights),
             weighted_power_integral(uk, q, 0.0, p.weights)};
  r.e1 = {l2_inner(u, e1, p.weights), l2_inner(uk, e1, p.weights)};
  r.nl_e1 = {nl_e1(u), nl_e1(uk)};
  double fg = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) fg = std::max(fg, std::abs(uk[k] - u[k]));
  r.field_gap = fg / scale;
  return r;
}

}  // namespace henon
