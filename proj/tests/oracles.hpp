#pragma once

// Independent reference computations used by the unit and acceptance tests.
// They only evaluate φ through energy(); none of the solver machinery is used.

#include <cmath>
#include <functional>

#include "henon/functional.hpp"

namespace henon::oracle {

/// Maximum of a unimodal function on [a, b] by golden-section search.
inline double golden_section_max(const std::function<double(double)>& f, double a, double b,
                                 int iters = 200) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int k = 0; k < iters && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++k) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

/// max_{t>0, s} φ(t v + s e) by a grid search refined around the best node.
struct FiberMax {
  double phi = -INFINITY;
  double t = 0.0;
  double s = 0.0;
};

inline FiberMax brute_force_fiber_max(const Field& v, const Field& e, const Problem& p,
                                      double t_hi, double s_half) {
  FiberMax best;
  double t_lo = 0.0;
  double s_lo = -s_half, s_hi = s_half;
  const int n = 24;
  for (int round = 0; round < 60; ++round) {
    for (int a = 0; a <= n; ++a) {
      const double t = t_lo + (t_hi - t_lo) * a / n;
      if (t <= 0.0) continue;
      for (int b = 0; b <= n; ++b) {
        const double s = s_lo + (s_hi - s_lo) * b / n;
        Field u = t * v;
        u.axpy(s, e);
        const double ph = energy(u, p).phi;
        if (ph > best.phi) best = {ph, t, s};
      }
    }
    const double ht = (t_hi - t_lo) / n * 2.0;
    const double hs = (s_hi - s_lo) / n * 2.0;
    t_lo = std::max(0.0, best.t - ht);
    t_hi = best.t + ht;
    s_lo = best.s - hs;
    s_hi = best.s + hs;
  }
  return best;
}

}  // namespace henon::oracle
