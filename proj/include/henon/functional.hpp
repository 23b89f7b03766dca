#pragma once

// Discrete energy φ(u) = ½(∫|∇u|² − λ∫u²) − (1/2*)∫|x|^α|u|^{2*}, its
// Riesz gradient and Hessian in the Dirichlet inner product, and the
// constraint map F(u) = (⟨∇φ(u), u⟩, Q∇φ(u)).
//
// Gradients are H-gradients: h_inner(h_gradient(u), v) equals the exact
// derivative of the discrete energy along v, which costs one Poisson solve.

#include <Eigen/Dense>
#include <vector>

#include "henon/problem.hpp"

namespace henon {

struct EnergyBreakdown {
  double dirichlet = 0.0;  ///< ∫|∇u|²
  double mass = 0.0;       ///< ∫u²
  double critical = 0.0;   ///< ∫|x|^α|u|^{2*}
  double phi = 0.0;
};

EnergyBreakdown energy(const Field& u, const Problem& p);

/// Dφ(u)v without a Poisson solve.
double directional_derivative(const Field& u, const Field& v, const Problem& p);

/// D²φ(u)(a, b) without a Poisson solve.
double second_derivative(const Field& u, const Field& a, const Field& b, const Problem& p);

/// g = u − (−Δ)^{-1}(λu + |x|^α|u|^{2*-2}u).
Field h_gradient(const Field& u, const Problem& p);

/// v − (−Δ)^{-1}(λv + (2*−1)|x|^α|u|^{2*-2}v).
Field hessian_apply(const Field& u, const Field& v, const Problem& p);

/// ‖u‖_H
double h_norm(const Field& u, const Problem& p);

struct ConstraintValue {
  double s = 0.0;          ///< ⟨∇φ(u), u⟩
  std::vector<double> z;   ///< L²-coordinates of Q∇φ(u)
  double qg_h_norm = 0.0;  ///< ‖Q∇φ(u)‖_H
  double u_h_norm = 0.0;

  /// Scale-free size of F: |s| / max(1, ‖u‖²) and ‖Qg‖ / max(1, ‖u‖) combined in ℓ².
  double residual() const;
};

/// Throws ConfigError for u = 0 (the constraint set excludes 0).
ConstraintValue constraint_F(const Field& u, const SubspaceSplit& split, const Problem& p);

/// Matrix of the form (t, z) ↦ (DF(u)(tu + z))·(t, z) in the basis
/// (u, e_1, ..., e_m): D²φ(u) on span(u, Z) minus the stationarity terms
/// t⟨∇φ(u), tu + 2z⟩. Negative definite on the constraint set.
Eigen::MatrixXd constraint_form_matrix(const Field& u, const SubspaceSplit& split,
                                       const Problem& p);

}  // namespace henon
