#pragma once

// Generalised Nehari manifold 𝒩 = {u ≠ 0 : ⟨∇φ(u), u⟩ = 0, ∇φ(u) ∈ Y} and
// the ground-state level c = inf_𝒩 φ = inf_{v ∈ Y} max_{t>0, w ∈ Z} φ(tv + w).
//
// project_to_nehari solves the (m+1)-dimensional fiber problem for one
// direction v; minimize_over_Y runs projected gradient descent for
// J(v) = max_fiber φ on the unit H-sphere of Y.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "henon/functional.hpp"

namespace henon {

struct ProjectionOptions {
  double tol = 1e-12;  ///< on ConstraintValue::residual()
  int max_newton = 60;
};

struct NehariPoint {
  Field u;                        ///< f v + Σ g_j e_j
  double f = 0.0;                 ///< > 0
  std::vector<double> g_coords;   ///< L²-coordinates of g(v) in Z
  Field v;                        ///< unit H-norm direction in Y
  double residual = 0.0;          ///< ConstraintValue::residual() at u
  double phi = 0.0;
  int newton_iterations = 0;
  bool used_fallback = false;
};

/// Fiber maximum of φ over ℝ₊v ⊕ Z. v is projected onto Y and H-normalised
/// first. `warm` (f, g) seeds Newton when given.
/// Throws ConfigError if v lies in span(Z), NumericalError if Newton and the
/// fallback scan both fail or the fiber has no positive maximum.
NehariPoint project_to_nehari(const Field& v, const SubspaceSplit& split, const Problem& p,
                              const ProjectionOptions& opts = {},
                              const NehariPoint* warm = nullptr);

enum class InitialGuess { Instanton, Random };

struct SolverConfig {
  double tol_c = 1e-9;           ///< constraint residual
  double tol_g = 1e-6;           ///< ‖∇φ(u)‖_H ≤ tol_g · max(1, ‖u‖_H)
  int max_iter = 20000;
  int stall_window = 200;        ///< iterations without measurable decrease before giving up
  InitialGuess init = InitialGuess::Instanton;
  std::uint64_t seed = 1;
  double seed_eps = 0.05;        ///< instanton concentration, ℓ = ε^{1/4}
  bool canonical_orientation = true;  ///< reflect θ ↦ π − θ so u is nonincreasing in θ
  ProjectionOptions projection;
};

struct GroundStateReport {
  Field u;
  Field v;
  double f = 0.0;
  std::vector<double> g_coords;
  double level_c = 0.0;
  double grad_norm = 0.0;              ///< full ‖∇φ(u)‖_H
  double grad_scale = 1.0;             ///< max(1, ‖u‖_H)
  double constraint_residual = 0.0;
  std::optional<int> morse_index;      ///< symmetric-class, filled by callers that compute it
  bool changes_sign = false;
  double theta_monotone_defect = 0.0;  ///< relative to ‖u‖_∞
  bool reflected = false;
  int iterations = 0;
  bool converged = false;
  std::string status;
  int m = 0;
  std::vector<double> energy_history;  ///< J(v_k) per accepted step
};

/// Single sequential run; deterministic for a given config.
GroundStateReport minimize_over_Y(const SubspaceSplit& split, const Problem& p,
                                  const SolverConfig& cfg, const Field* initial_direction = nullptr);

/// The level of a report, flagged when the run did not converge.
struct LevelValue {
  double value = 0.0;
  bool flagged = false;
};
LevelValue level_c(const GroundStateReport& report);

/// Direction used to seed the solver: instanton or random smooth field, with
/// its Z-component removed and H-normalised.
Field initial_direction(const SubspaceSplit& split, const Problem& p, const SolverConfig& cfg);

}  // namespace henon
