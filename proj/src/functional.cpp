#include "henon/functional.hpp"

#include <cmath>

#include "henon/error.hpp"
#include "henon/simd/kernels.hpp"

namespace henon {
namespace {

// |x|^α |u|^{2*-2} u per node (no quadrature weight).
std::vector<double> nonlinearity(const Field& u, const Problem& p) {
  std::vector<double> out(u.size());
  simd::active_kernels().signed_pow(u.data(), p.r_alpha.data(), p.crit_exp() - 2.0, out.data(),
                                    u.size());
  return out;
}

// |x|^α |u|^{2*-2} per node.
std::vector<double> potential(const Field& u, const Problem& p) {
  std::vector<double> out(u.size());
  simd::active_kernels().abs_pow(u.data(), p.r_alpha.data(), p.crit_exp() - 2.0, out.data(),
                                 u.size());
  return out;
}

}  // namespace

EnergyBreakdown energy(const Field& u, const Problem& p) {
  require_same_grid(*u.grid(), *p.grid);
  EnergyBreakdown e;
  e.dirichlet = h_inner(u, u, p.weights);
  e.mass = l2_inner(u, u, p.weights);
  e.critical = simd::active_kernels().abs_pow_sum(u.data(), p.alpha_weight.data(), p.crit_exp(),
                                                  u.size());
  e.phi = 0.5 * (e.dirichlet - p.spec.lambda * e.mass) - e.critical / p.crit_exp();
  return e;
}

double directional_derivative(const Field& u, const Field& v, const Problem& p) {
  const auto f = nonlinearity(u, p);
  const double nl = simd::active_kernels().dot3(f.data(), v.data(), p.weights.w.data(), u.size());
  return h_inner(u, v, p.weights) - p.spec.lambda * l2_inner(u, v, p.weights) - nl;
}

double second_derivative(const Field& u, const Field& a, const Field& b, const Problem& p) {
  const auto q = potential(u, p);
  std::vector<double> qa(u.size());
  for (std::size_t k = 0; k < qa.size(); ++k) qa[k] = q[k] * a[k];
  const double nl = simd::active_kernels().dot3(qa.data(), b.data(), p.weights.w.data(), u.size());
  return h_inner(a, b, p.weights) - p.spec.lambda * l2_inner(a, b, p.weights) -
         (p.crit_exp() - 1.0) * nl;
}

Field h_gradient(const Field& u, const Problem& p) {
  require_same_grid(*u.grid(), *p.grid);
  const auto f = nonlinearity(u, p);
  Field rhs(p.grid);
  const std::size_t n = p.grid->interior_size();
  for (std::size_t k = 0; k < n; ++k) rhs[k] = p.weights.w[k] * (p.spec.lambda * u[k] + f[k]);
  Field g = u;
  g.apply_dirichlet();
  g -= p.op.solve_stiffness(rhs);
  return g;
}

Field hessian_apply(const Field& u, const Field& v, const Problem& p) {
  require_same_grid(*u.grid(), *p.grid);
  require_same_grid(*v.grid(), *p.grid);
  const auto q = potential(u, p);
  const double c = p.crit_exp() - 1.0;
  Field rhs(p.grid);
  const std::size_t n = p.grid->interior_size();
  for (std::size_t k = 0; k < n; ++k) rhs[k] = p.weights.w[k] * (p.spec.lambda + c * q[k]) * v[k];
  Field out = v;
  out.apply_dirichlet();
  out -= p.op.solve_stiffness(rhs);
  return out;
}

double h_norm(const Field& u, const Problem& p) {
  return std::sqrt(std::max(h_inner(u, u, p.weights), 0.0));
}

double ConstraintValue::residual() const {
  const double scale = std::max(1.0, u_h_norm);
  const double a = s / (scale * scale);
  const double b = qg_h_norm / scale;
  return std::sqrt(a * a + b * b);
}

ConstraintValue constraint_F(const Field& u, const SubspaceSplit& split, const Problem& p) {
  if (u.max_abs() == 0.0) throw ConfigError("constraint map is undefined at u = 0");
  ConstraintValue out;
  // ⟨∇φ(u), v⟩_H = Dφ(u)v, and Q∇φ(u) has L²-coordinates Dφ(u)e_j / λ_j
  out.s = directional_derivative(u, u, p);
  out.u_h_norm = h_norm(u, p);
  double qn2 = 0.0;
  for (std::size_t j = 0; j < split.z_basis.size(); ++j) {
    const double d = directional_derivative(u, split.z_basis[j], p);
    const double lam = split.z_eigvals[j];
    out.z.push_back(d / lam);
    qn2 += d * d / lam;
  }
  out.qg_h_norm = std::sqrt(qn2);
  return out;
}

Eigen::MatrixXd constraint_form_matrix(const Field& u, const SubspaceSplit& split,
                                       const Problem& p) {
  const int m = split.m;
  std::vector<const Field*> basis{&u};
  for (const Field& e : split.z_basis) basis.push_back(&e);
  Eigen::MatrixXd M(m + 1, m + 1);
  for (int a = 0; a <= m; ++a) {
    for (int b = a; b <= m; ++b) {
      M(a, b) = M(b, a) = second_derivative(u, *basis[a], *basis[b], p);
    }
  }
  M(0, 0) -= directional_derivative(u, u, p);
  for (int j = 1; j <= m; ++j) {
    const double d = directional_derivative(u, *basis[j], p);
    M(0, j) -= d;
    M(j, 0) -= d;
  }
  return M;
}

}  // namespace henon
