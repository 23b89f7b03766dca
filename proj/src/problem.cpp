#include "henon/problem.hpp"

#include <cmath>

namespace henon {
namespace {

std::vector<double> node_r_alpha(const Grid& g, double alpha) {
  std::vector<double> out(g.size(), 1.0);
  if (alpha == 0.0) return out;
  for (int i = 0; i < g.nr(); ++i) {
    const double ra = std::pow(g.r(i), alpha);
    for (int j = 0; j < g.ntheta(); ++j) out[g.index(i, j)] = ra;
  }
  return out;
}

}  // namespace

Problem Problem::build(const ProblemSpec& spec, int nr, int ntheta) {
  const ProblemSpec checked = ProblemSpec::make(spec.dim, spec.lambda, spec.alpha);
  GridPtr grid = Grid::build(checked, nr, ntheta);
  Weights weights = Weights::build(grid);
  Operator op = Operator::assemble(grid, weights);
  Problem p{checked, grid, weights, std::move(op), {}, {}};
  p.r_alpha = node_r_alpha(*grid, checked.alpha);
  p.alpha_weight = alpha_weighted(p.weights, checked.alpha);
  return p;
}

Problem Problem::with_spec(const ProblemSpec& other) const {
  const ProblemSpec checked = ProblemSpec::make(other.dim, other.lambda, other.alpha);
  Problem p = *this;
  p.spec = checked;
  if (checked.alpha != spec.alpha) {
    p.r_alpha = node_r_alpha(*grid, checked.alpha);
    p.alpha_weight = alpha_weighted(p.weights, checked.alpha);
  }
  return p;
}

}  // namespace henon
