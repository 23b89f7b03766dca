#pragma once

// Qualitative checks on computed ground states: sign change, symmetric-class
// Morse index, equatorial polarization and θ-monotonicity.
//
// The only halfspace of the polarization family representable in reduced
// coordinates is K = {x·p ≥ 0}, whose reflection is θ ↦ π − θ, i.e. the node
// permutation j ↦ ntheta − 1 − j.

#include <optional>
#include <vector>

#include "henon/problem.hpp"

namespace henon {

struct SignChange {
  bool changes_sign = false;
  double min = 0.0;
  double max = 0.0;
  std::optional<double> e1_projection;  ///< ∫ u e₁ when e₁ is supplied
};

/// min u < −tol‖u‖_∞ and max u > tol‖u‖_∞. Throws ConfigError for u = 0.
SignChange sign_change(const Field& u, const Weights& weights, const Field* e1 = nullptr,
                       double tol = 1e-8);

struct MorseResult {
  int index = 0;                     ///< Hessian eigenvalues below −eps_morse
  std::vector<double> hessian_eigs;  ///< lowest computed, ascending
  double eps_morse = 0.0;
  bool ambiguous = false;  ///< an eigenvalue sits near zero, or all requested ones are negative
  int lanczos_steps = 0;
};

/// Symmetric-class Morse index of φ at u: negative eigenvalues of
/// v ↦ hessian_apply(u, v), which are 1 − τ for the generalized pencil
/// W(λ + (2*−1)|x|^α|u|^{2*−2}) v = τ K v. Computes the k lowest.
/// Throws ConfigError for k < 1 or when ‖∇φ(u)‖_H > grad_tol·max(1, ‖u‖_H),
/// NumericalError if the Lanczos iteration does not converge.
MorseResult morse_index(const Field& u, const Problem& p, int k, double grad_tol = 1e-5);

/// u(r, π − θ).
Field reflect_theta(const Field& u);

/// u_K: max{u, u∘σ} on θ < π/2 and min{u, u∘σ} on θ > π/2.
Field polarize_equatorial(const Field& u);

struct MonotoneDefect {
  double defect = 0.0;        ///< max over slices of the total variation against the orientation
  bool nonincreasing = true;  ///< orientation achieving the smaller defect
};

MonotoneDefect theta_monotonicity(const Field& u);

struct InvarianceGap {
  double before = 0.0;
  double after = 0.0;
  double gap() const;
  double relative() const;  ///< gap / max(|before|, |after|), 0 when both vanish
};

struct SymmetryReport {
  double theta_monotone_defect = 0.0;  ///< relative to ‖u‖_∞
  InvarianceGap energy;                ///< φ
  InvarianceGap dirichlet;
  InvarianceGap l2;
  InvarianceGap lcrit;       ///< ∫|u|^{2*}
  InvarianceGap e1;          ///< ∫u e₁
  InvarianceGap nl_e1;       ///< ∫|x|^α|u|^{2*−2}u e₁
  double field_gap = 0.0;    ///< ‖u_K − u‖_∞ / ‖u‖_∞
  double max_relative_gap() const;  ///< over the integral invariants, φ excluded
};

/// Compares u with its equatorial polarization. e₁ is the first Dirichlet
/// eigenfield.
SymmetryReport polarization_invariants(const Field& u, const Problem& p, const Field& e1);

}  // namespace henon
