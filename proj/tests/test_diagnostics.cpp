#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "henon/diagnostics.hpp"
#include "henon/error.hpp"
#include "henon/functional.hpp"
#include "henon/nehari.hpp"
#include "support.hpp"

using namespace henon;

namespace {

template <class F>
Field sample(const GridPtr& g, F&& f) {
  Field u(g);
  for (int i = 0; i + 1 < g->nr(); ++i) {
    for (int j = 0; j < g->ntheta(); ++j) u(i, j) = f(g->r(i), g->theta(j));
  }
  return u;
}

// Negative eigenvalues of K − B with B = diag(w (λ + (2*−1)|x|^α|u|^{2*−2})), from
// the signs of a dense LDLᵀ factorization (Sylvester's law of inertia).
int inertia_oracle(const Field& u, const Problem& p) {
  const int n = static_cast<int>(p.grid->interior_size());
  Eigen::MatrixXd K(n, n);
  for (int c = 0; c < n; ++c) {
    Field e(p.grid);
    e[c] = 1.0;
    const Field col = p.op.stiffness(e);
    for (int r = 0; r < n; ++r) K(r, c) = col[r];
  }
  const double q = p.crit_exp();
  for (int k = 0; k < n; ++k) {
    K(k, k) -= p.weights.w[k] * (p.spec.lambda + (q - 1.0) * p.r_alpha[k] * std::pow(std::abs(u[k]), q - 2.0));
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
  int neg = 0;
  for (int k = 0; k < n; ++k) neg += ldlt.vectorD()[k] < 0.0;
  return neg;
}

}  // namespace

TEST_CASE("sign change of eigenfields") {
  const test::Fixture& f = test::fixture(5, 1.1, 0.0, 64, 16);
  const SignChange s1 = sign_change(f.spectrum.eigfields[0], f.p.weights, &f.spectrum.eigfields[0]);
  CHECK_FALSE(s1.changes_sign);
  REQUIRE(s1.e1_projection.has_value());
  CHECK(*s1.e1_projection == doctest::Approx(1.0));
  REQUIRE(f.spectrum.angular_mode[1] == 1);
  CHECK(sign_change(f.spectrum.eigfields[1], f.p.weights).changes_sign);
  CHECK_THROWS_AS(sign_change(Field(f.p.grid), f.p.weights), ConfigError);
}

TEST_CASE("Morse index at zero counts the eigenvalues below lambda") {
  const test::Fixture& f = test::fixture(5, 1.1, 0.0, 64, 16);
  const Field zero(f.p.grid);
  const MorseResult m1 = morse_index(zero, f.p, 4);
  CHECK(m1.index == 1);
  for (int j = 0; j < 4; ++j) {
    CHECK(m1.hessian_eigs[j] == doctest::Approx(1.0 - f.p.spec.lambda / f.spectrum.eigvals[j]).epsilon(1e-8));
  }
  const Problem p3 = f.p.with_spec(ProblemSpec::make(5, 0.5 * (f.spectrum.eigvals[2] + f.spectrum.eigvals[3]), 0.0));
  CHECK(morse_index(zero, p3, 6).index == 3);
  const Problem p0 = f.p.with_spec(ProblemSpec::make(5, 0.0, 0.0));
  const MorseResult m0 = morse_index(zero, p0, 3);
  CHECK(m0.index == 0);
  CHECK_THROWS_AS(morse_index(zero, f.p, 0), ConfigError);

  std::mt19937_64 rng(2);
  Field noisy = random_smooth_field(f.p.grid, rng);
  noisy *= 3.0 / noisy.max_abs();
  CHECK_THROWS_AS(morse_index(noisy, f.p, 3), ConfigError);
}

TEST_CASE("Morse index of ground states against a dense inertia count") {
  for (double factor : {0.5, 1.1}) {
    CAPTURE(factor);
    const test::Fixture& f = test::fixture(5, factor, 0.05, 24, 8);
    SolverConfig cfg;
    cfg.init = InitialGuess::Random;
    const GroundStateReport r = minimize_over_Y(f.split, f.p, cfg);
    REQUIRE(r.converged);
    const MorseResult m = morse_index(r.u, f.p, f.split.m + 3);
    CHECK(m.index == f.split.m + 1);
    CHECK_FALSE(m.ambiguous);
    CHECK(inertia_oracle(r.u, f.p) == m.index);
  }
}

TEST_CASE("reflection and polarization") {
  const test::Fixture& f = test::fixture(5, 1.1, 0.0, 32, 16);
  const GridPtr& g = f.p.grid;
  const Field mono = sample(g, [](double r, double t) { return (1.0 - r * r) * (1.0 + std::cos(t)); });
  const Field anti = reflect_theta(mono);

  const Field pm = polarize_equatorial(mono);
  for (std::size_t k = 0; k < pm.size(); ++k) CHECK(pm[k] == mono[k]);
  const Field pa = polarize_equatorial(anti);
  for (std::size_t k = 0; k < pa.size(); ++k) CHECK(pa[k] == mono[k]);
  const Field rr = reflect_theta(anti);
  for (std::size_t k = 0; k < rr.size(); ++k) CHECK(rr[k] == mono[k]);

  std::mt19937_64 rng(5);
  const Field u = random_smooth_field(g, rng, 5, 6);
  const Field uk = polarize_equatorial(u);
  const Field ukk = polarize_equatorial(uk);
  for (std::size_t k = 0; k < u.size(); ++k) CHECK(ukk[k] == uk[k]);
  const int nt = g->ntheta();
  for (int i = 0; i < g->nr(); ++i) {
    for (int j = 0; j < nt / 2; ++j) {
      CHECK(uk(i, j) >= u(i, j));
      CHECK(uk(i, nt - 1 - j) <= u(i, nt - 1 - j));
    }
  }
}

TEST_CASE("polarization invariants") {
  const test::Fixture& f = test::fixture(5, 1.1, 0.05, 32, 16);
  const Field& e1 = f.spectrum.eigfields[0];
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const Field u = random_smooth_field(f.p.grid, rng, 5, 6);
    const SymmetryReport s = polarization_invariants(u, f.p, e1);
    CHECK(s.l2.relative() <= 1e-13);
    CHECK(s.lcrit.relative() <= 1e-13);
    CHECK(s.e1.gap() <= 1e-13 * std::sqrt(s.l2.before));
    // the discrete form can only drop under polarization
    CHECK(s.dirichlet.after <= s.dirichlet.before * (1.0 + 1e-13));
  }
  // a reflected monotone field polarizes by a pure permutation
  const Field mono = sample(f.p.grid, [](double r, double t) { return (1.0 - r * r) * std::exp(std::cos(t)); });
  const SymmetryReport s = polarization_invariants(reflect_theta(mono), f.p, e1);
  CHECK(s.dirichlet.gap() <= 1e-10 * s.dirichlet.before);
  CHECK(s.max_relative_gap() <= 1e-10);
  CHECK(s.energy.relative() <= 1e-10);
  CHECK(s.field_gap > 0.1);
}

TEST_CASE("theta monotonicity defect") {
  const test::Fixture& f = test::fixture(5, 1.1, 0.0, 32, 16);
  const Field c1 = sample(f.p.grid, [](double r, double t) { return (1.0 - r) * std::cos(t); });
  const MonotoneDefect m1 = theta_monotonicity(c1);
  CHECK(m1.defect == 0.0);
  CHECK(m1.nonincreasing);
  const MonotoneDefect m1r = theta_monotonicity(reflect_theta(c1));
  CHECK(m1r.defect == 0.0);
  CHECK_FALSE(m1r.nonincreasing);
  const Field c2 = sample(f.p.grid, [](double r, double t) { return (1.0 - r) * std::cos(2.0 * t); });
  CHECK(theta_monotonicity(c2).defect > 0.1 * c2.max_abs());
}

TEST_CASE("ground state diagnostics at m = 1") {
  const test::Fixture& f = test::fixture(5, 1.1, 0.05, 64, 16);
  const GroundStateReport r = minimize_over_Y(f.split, f.p, SolverConfig{});
  REQUIRE(r.converged);
  const SymmetryReport s = polarization_invariants(r.u, f.p, f.spectrum.eigfields[0]);
  CHECK(s.max_relative_gap() <= 1e-10);
  CHECK(s.energy.relative() <= 1e-10);
  CHECK(s.field_gap <= 1e-4);
  CHECK(s.theta_monotone_defect <= 1e-4);
  CHECK(sign_change(r.u, f.p.weights).changes_sign);
  CHECK(morse_index(r.u, f.p, 4).index == 2);
}
