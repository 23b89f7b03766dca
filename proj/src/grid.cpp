#include "henon/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "henon/error.hpp"
#include "henon/simd/kernels.hpp"

namespace henon {

ProblemSpec ProblemSpec::make(int dim, double lambda, double alpha) {
  if (dim < 3) throw ConfigError("dimension must be >= 3, got " + std::to_string(dim));
  if (!std::isfinite(lambda) || lambda < 0.0) throw ConfigError("lambda must be finite and >= 0");
  if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("alpha must be finite and >= 0");
  return ProblemSpec{dim, lambda, alpha};
}

double ball_volume(int dim) {
  return std::pow(std::numbers::pi, dim / 2.0) / std::tgamma(dim / 2.0 + 1.0);
}

double sphere_area(int k) {
  const double n = k + 1.0;
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

Grid::Grid(int dim, int nr, int ntheta)
    : dim_(dim),
      nr_(nr),
      ntheta_(ntheta),
      dr_(1.0 / (nr - 0.5)),
      dtheta_(std::numbers::pi / ntheta),
      r_(nr),
      theta_(ntheta) {
  for (int i = 0; i < nr; ++i) r_[i] = (i + 0.5) * dr_;
  r_[nr - 1] = 1.0;
  for (int j = 0; j < ntheta; ++j) theta_[j] = (j + 0.5) * dtheta_;
}

std::shared_ptr<const Grid> Grid::build(const ProblemSpec& spec, int nr, int ntheta) {
  if (spec.dim < 3) throw ConfigError("dimension must be >= 3");
  if (nr < kMinRadial) throw ConfigError("nr must be >= 8, got " + std::to_string(nr));
  if (ntheta < kMinAngular) throw ConfigError("ntheta must be >= 4, got " + std::to_string(ntheta));
  if (ntheta % 2 != 0) throw ConfigError("ntheta must be even, got " + std::to_string(ntheta));
  return std::shared_ptr<const Grid>(new Grid(spec.dim, nr, ntheta));
}

// ---------------------------------------------------------------------------

Field::Field(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size(), 0.0) {}

Field::Field(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw ConfigError("field size does not match grid");
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*grid_, *o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += o.values_[k];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*grid_, *o.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& x : values_) x *= s;
  return *this;
}

Field& Field::axpy(double a, const Field& x) {
  require_same_grid(*grid_, *x.grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * x.values_[k];
  return *this;
}

void Field::apply_dirichlet() {
  const std::size_t start = grid_->interior_size();
  std::fill(values_.begin() + static_cast<std::ptrdiff_t>(start), values_.end(), 0.0);
}

double Field::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::fabs(x));
  return m;
}

double Field::boundary_defect() const {
  double m = 0.0;
  for (std::size_t k = grid_->interior_size(); k < values_.size(); ++k) {
    m = std::max(m, std::fabs(values_[k]));
  }
  return m;
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

// ---------------------------------------------------------------------------

AxisFactors axis_factors(const Grid& grid) {
  const int n = grid.dim();
  const int nr = grid.nr();
  const int nt = grid.ntheta();
  const double dr = grid.dr();
  const double dt = grid.dtheta();

  AxisFactors f;
  f.omega = sphere_area(n - 2);
  f.vol.resize(nr);
  f.vol_rinv2.resize(nr);
  f.radial_face.resize(nr - 1);
  for (int i = 0; i < nr; ++i) {
    const double a = i * dr;
    const double b = (i == nr - 1) ? 1.0 : (i + 1) * dr;
    f.vol[i] = (std::pow(b, n) - std::pow(a, n)) / n;
    f.vol_rinv2[i] = (std::pow(b, n - 2) - std::pow(a, n - 2)) / (n - 2);
  }
  for (int i = 0; i + 1 < nr; ++i) f.radial_face[i] = std::pow((i + 1) * dr, n - 1) / dr;

  f.sin_cell.resize(nt);
  f.sin_face.resize(nt);
  for (int j = 0; j < nt; ++j) {
    f.sin_cell[j] = std::pow(std::sin(grid.theta(j)), n - 2) * dt;
    f.sin_face[j] = std::pow(std::sin((j + 1) * dt), n - 2) / dt;
  }
  f.sin_face[nt - 1] = 0.0;
  for (int j = 0; j < nt / 2; ++j) f.sin_cell[nt - 1 - j] = f.sin_cell[j];
  for (int j = 0; j + 1 < nt / 2; ++j) f.sin_face[nt - 2 - j] = f.sin_face[j];
  return f;
}

Weights Weights::build(const GridPtr& grid) {
  const AxisFactors f = axis_factors(*grid);
  const int nr = grid->nr();
  const int nt = grid->ntheta();

  Weights out;
  out.grid = grid;
  out.w.resize(grid->size());
  out.radial_face.resize(grid->interior_size());
  out.angular_face.assign(grid->size() - 1, 0.0);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < nt; ++j) out.w[grid->index(i, j)] = f.omega * f.vol[i] * f.sin_cell[j];
  }
  for (int i = 0; i + 1 < nr; ++i) {
    const double c = f.omega * f.radial_face[i];
    for (int j = 0; j < nt; ++j) out.radial_face[grid->index(i, j)] = c * f.sin_cell[j];
  }
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j + 1 < nt; ++j) {
      out.angular_face[grid->index(i, j)] = f.omega * f.vol_rinv2[i] * f.sin_face[j];
    }
  }
  return out;
}

double Weights::total() const {
  double s = 0.0;
  for (double x : w) s += x;
  return s;
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!a.same_shape(b)) throw ConfigError("grid mismatch");
}

double integrate(const Field& f, const Weights& weights) {
  require_same_grid(*f.grid(), *weights.grid);
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) s += f[k] * weights.w[k];
  return s;
}

double l2_inner(const Field& u, const Field& v, const Weights& weights) {
  require_same_grid(*u.grid(), *weights.grid);
  require_same_grid(*v.grid(), *weights.grid);
  return simd::active_kernels().dot3(u.data(), v.data(), weights.w.data(), u.size());
}

std::vector<double> alpha_weighted(const Weights& weights, double alpha) {
  const Grid& g = *weights.grid;
  std::vector<double> out(weights.w);
  if (alpha == 0.0) return out;
  for (int i = 0; i < g.nr(); ++i) {
    const double ra = std::pow(g.r(i), alpha);
    for (int j = 0; j < g.ntheta(); ++j) out[g.index(i, j)] *= ra;
  }
  return out;
}

double weighted_power_integral(const Field& u, double p, double alpha, const Weights& weights) {
  require_same_grid(*u.grid(), *weights.grid);
  if (!(p >= 1.0)) throw ConfigError("power must be >= 1");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  const std::vector<double> coef = alpha_weighted(weights, alpha);
  return simd::active_kernels().abs_pow_sum(u.data(), coef.data(), p, u.size());
}

double h_inner(const Field& u, const Field& v, const Weights& weights) {
  require_same_grid(*u.grid(), *weights.grid);
  require_same_grid(*v.grid(), *weights.grid);
  const auto& k = simd::active_kernels();
  const std::size_t nt = static_cast<std::size_t>(weights.grid->ntheta());
  return k.face_form(u.data(), v.data(), weights.radial_face.data(), nt, weights.radial_face.size()) +
         k.face_form(u.data(), v.data(), weights.angular_face.data(), 1, weights.angular_face.size());
}

Field random_smooth_field(const GridPtr& grid, std::mt19937_64& rng, int radial_modes,
                          int angular_modes) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> coef(static_cast<std::size_t>(radial_modes) * angular_modes);
  for (int a = 1; a <= radial_modes; ++a) {
    for (int b = 0; b < angular_modes; ++b) {
      coef[(a - 1) * angular_modes + b] = normal(rng) / ((a) * (b + 1.0) * (a) * (b + 1.0));
    }
  }
  Field f(grid);
  for (int i = 0; i < grid->nr(); ++i) {
    for (int j = 0; j < grid->ntheta(); ++j) {
      double s = 0.0;
      for (int a = 1; a <= radial_modes; ++a) {
        const double rad = std::sin(a * std::numbers::pi * grid->r(i));
        for (int b = 0; b < angular_modes; ++b) {
          s += coef[(a - 1) * angular_modes + b] * rad * std::cos(b * grid->theta(j));
        }
      }
      f(i, j) = s;
    }
  }
  f.apply_dirichlet();
  return f;
}

}  // namespace henon
