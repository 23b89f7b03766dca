#pragma once

#include <memory>
#include <vector>

#include "henon/grid.hpp"
#include "henon/spectral.hpp"

namespace henon {

/// Everything needed to evaluate φ on one grid: the problem instance, the
/// quadrature, the assembled operator and the Hénon-weighted node coefficients.
/// Immutable after build() and safe to share between threads.
struct Problem {
  ProblemSpec spec;
  GridPtr grid;
  Weights weights;
  Operator op;
  std::vector<double> r_alpha;       ///< r_i^α
  std::vector<double> alpha_weight;  ///< w_i r_i^α

  static Problem build(const ProblemSpec& spec, int nr, int ntheta);
  /// Same grid and operator, different λ or α.
  Problem with_spec(const ProblemSpec& other) const;

  double crit_exp() const { return spec.crit_exp(); }
};

}  // namespace henon
