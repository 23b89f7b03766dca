#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "henon/error.hpp"
#include "henon/field_io.hpp"
#include "henon/grid.hpp"
#include "support.hpp"

using namespace henon;
using henon::test::rel_err;

namespace {

constexpr double kPi = std::numbers::pi;

GridPtr grid(int dim, int nr, int nt) { return Grid::build(ProblemSpec::make(dim, 0.0, 0.0), nr, nt); }

template <class F>
Field sample(const GridPtr& g, F&& f) {
  Field u(g);
  for (int i = 0; i < g->nr(); ++i) {
    for (int j = 0; j < g->ntheta(); ++j) u(i, j) = f(g->r(i), g->theta(j));
  }
  return u;
}

}  // namespace

TEST_CASE("problem and grid preconditions") {
  CHECK_THROWS_AS(ProblemSpec::make(2, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(ProblemSpec::make(3, -1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(ProblemSpec::make(3, 0.0, -0.5), ConfigError);
  CHECK_THROWS_AS(ProblemSpec::make(3, std::nan(""), 0.0), ConfigError);
  const auto spec = ProblemSpec::make(5, 1.0, 0.1);
  CHECK(spec.crit_exp() == doctest::Approx(10.0 / 3.0));
  CHECK_THROWS_AS(Grid::build(spec, 7, 16), ConfigError);
  CHECK_THROWS_AS(Grid::build(spec, 32, 2), ConfigError);
  CHECK_THROWS_AS(Grid::build(spec, 32, 33), ConfigError);
}

TEST_CASE("node placement: last row on the sphere, theta reflection exact") {
  const auto g = grid(3, 32, 16);
  CHECK(g->r(g->nr() - 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g->r(0) == doctest::Approx(0.5 * g->dr()));
  for (int j = 0; j < g->ntheta(); ++j) {
    CHECK(g->theta(j) + g->theta(g->ntheta() - 1 - j) == doctest::Approx(kPi).epsilon(1e-15));
  }
  CHECK(g->interior_size() == static_cast<std::size_t>(31 * 16));
}

TEST_CASE("measure constants") {
  CHECK(sphere_area(1) == doctest::Approx(2.0 * kPi));
  CHECK(sphere_area(2) == doctest::Approx(4.0 * kPi));
  CHECK(ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0));
  CHECK(ball_volume(4) == doctest::Approx(kPi * kPi / 2.0));
}

TEST_CASE("quadrature weights integrate the ball volume and are reflection symmetric") {
  for (int dim : {3, 4, 5, 6}) {
    CAPTURE(dim);
    const auto g = grid(dim, 128, 32);
    const Weights w = Weights::build(g);
    CHECK(rel_err(w.total(), ball_volume(dim)) < 1e-3);
    for (int i = 0; i < g->nr(); ++i) {
      for (int j = 0; j < g->ntheta(); ++j) {
        CHECK(w.w[g->index(i, j)] == w.w[g->index(i, g->ntheta() - 1 - j)]);
      }
    }
  }
}

TEST_CASE("Dirichlet form of polynomial fields matches closed forms") {
  for (int dim : {3, 5}) {
    CAPTURE(dim);
    const double n = dim;
    const double area = sphere_area(dim - 1);
    const auto g = grid(dim, 256, 64);
    const Weights w = Weights::build(g);

    // u = 1 - r²: ∫|∇u|² = 4 ∫ r² = 4 |S^{N-1}| / (N + 2)
    const Field radial = sample(g, [](double r, double) { return 1.0 - r * r; });
    CHECK(rel_err(h_inner(radial, radial, w), 4.0 * area / (n + 2.0)) < 2e-3);

    // u = x₁(1 - r²) exercises the angular faces
    const Field axial = sample(g, [](double r, double t) { return r * std::cos(t) * (1.0 - r * r); });
    const double exact =
        area * ((1.0 / n - 2.0 / (n + 2.0) + 1.0 / (n + 4.0)) -
                (4.0 / n) * (1.0 / (n + 2.0) - 1.0 / (n + 4.0)) + (4.0 / n) / (n + 4.0));
    CHECK(rel_err(h_inner(axial, axial, w), exact) < 2e-3);
  }
}

TEST_CASE("inner products: symmetry, bilinearity, consistency") {
  const auto g = grid(5, 48, 16);
  const Weights w = Weights::build(g);
  std::mt19937_64 rng(3);
  const Field a = random_smooth_field(g, rng);
  const Field b = random_smooth_field(g, rng);
  const Field c = random_smooth_field(g, rng);
  CHECK(h_inner(a, b, w) == doctest::Approx(h_inner(b, a, w)).epsilon(1e-13));
  CHECK(h_inner(a + 2.0 * b, c, w) ==
        doctest::Approx(h_inner(a, c, w) + 2.0 * h_inner(b, c, w)).epsilon(1e-12));
  CHECK(h_inner(a, a, w) > 0.0);

  Field sq(g);
  for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = a[k] * b[k];
  CHECK(l2_inner(a, b, w) == doctest::Approx(integrate(sq, w)).epsilon(1e-13));
  CHECK(weighted_power_integral(a, 2.0, 0.0, w) == doctest::Approx(l2_inner(a, a, w)).epsilon(1e-13));

  const auto aw = alpha_weighted(w, 0.5);
  for (int i = 0; i < g->nr(); ++i) {
    CHECK(aw[g->index(i, 3)] == doctest::Approx(w.w[g->index(i, 3)] * std::sqrt(g->r(i))));
  }
}

TEST_CASE("field arithmetic and boundary handling") {
  const auto g = grid(3, 16, 8);
  Field a(g), b(g);
  for (std::size_t k = 0; k < a.size(); ++k) {
    a[k] = static_cast<double>(k);
    b[k] = 1.0;
  }
  Field c = a + b;
  CHECK(c[5] == 6.0);
  c -= b;
  CHECK(c[5] == 5.0);
  c.axpy(2.0, b);
  CHECK(c[5] == 7.0);
  c *= 0.5;
  CHECK(c[5] == 3.5);
  CHECK((3.0 * b)[0] == 3.0);
  CHECK(a.max_abs() == static_cast<double>(a.size() - 1));
  CHECK(a.boundary_defect() > 0.0);
  a.apply_dirichlet();
  CHECK(a.boundary_defect() == 0.0);
  CHECK(a.all_finite());
  a[0] = std::nan("");
  CHECK_FALSE(a.all_finite());

  const auto other = grid(3, 16, 10);
  CHECK_THROWS_AS(require_same_grid(*g, *other), ConfigError);
  CHECK_THROWS_AS(Field(other) + b, ConfigError);
}

TEST_CASE("random smooth fields are deterministic and vanish on the sphere") {
  const auto g = grid(4, 32, 16);
  std::mt19937_64 r1(42), r2(42);
  const Field a = random_smooth_field(g, r1);
  const Field b = random_smooth_field(g, r2);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
  CHECK(a.boundary_defect() < 1e-13);
  CHECK(a.max_abs() > 0.0);
}

TEST_CASE("field CSV round trip is exact and checks the grid") {
  const auto g = grid(5, 20, 8);
  std::mt19937_64 rng(9);
  const Field a = random_smooth_field(g, rng);
  std::stringstream ss;
  write_field_csv(ss, a);
  const Field b = read_field_csv(ss, g);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);

  std::stringstream again;
  write_field_csv(again, a);
  CHECK_THROWS_AS(read_field_csv(again, grid(5, 20, 10)), ConfigError);
  std::stringstream junk("x,y,z\n1,2,3\n");
  CHECK_THROWS_AS(read_field_csv(junk, g), ConfigError);
}
