#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <tuple>

#include "henon/problem.hpp"
#include "henon/spectral.hpp"

namespace henon::test {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

/// A problem with its spectrum and split, λ = factor·λ₁.
struct Fixture {
  Problem base;
  Spectrum spectrum;
  Problem p;
  SubspaceSplit split;
};

inline Fixture make_fixture(int dim, double factor, double alpha, int nr, int ntheta, int k = 6) {
  Problem base = Problem::build(ProblemSpec::make(dim, 0.0, alpha), nr, ntheta);
  Spectrum sp = dirichlet_spectrum(base.op, k);
  Problem p = base.with_spec(ProblemSpec::make(dim, factor * sp.eigvals[0], alpha));
  SubspaceSplit split = split_space(p.spec, sp);
  return Fixture{std::move(base), std::move(sp), std::move(p), std::move(split)};
}

/// Fixtures are immutable; building each one once keeps the suite fast.
inline const Fixture& fixture(int dim, double factor, double alpha, int nr, int ntheta) {
  static std::map<std::tuple<int, double, double, int, int>, std::unique_ptr<Fixture>> cache;
  auto& slot = cache[{dim, factor, alpha, nr, ntheta}];
  if (!slot) slot = std::make_unique<Fixture>(make_fixture(dim, factor, alpha, nr, ntheta));
  return *slot;
}

}  // namespace henon::test
