#include "henon/instanton.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "henon/error.hpp"

namespace henon {
namespace {

using Gauss = boost::math::quadrature::gauss<double, 30>;

double bubble_coeff(int dim) {
  const double n = dim;
  return std::pow(n * (n - 2.0), (n - 2.0) / 4.0);
}

// U(d) and U'(d) of the unscaled bubble centred at x_ℓ.
double bubble(double d, double eps, int dim) {
  const double h = 0.5 * (dim - 2.0);
  return bubble_coeff(dim) * std::pow(eps, h) / std::pow(eps * eps + d * d, h);
}

double bubble_derivative(double d, double eps, int dim) {
  const double h = 0.5 * (dim - 2.0);
  return -2.0 * h * d * bubble_coeff(dim) * std::pow(eps, h) /
         std::pow(eps * eps + d * d, h + 1.0);
}

// Panel breakpoints in d: fine near the spike, geometric out to ℓ/2, then the ramp.
std::vector<double> panels(double eps, double ell) {
  std::vector<double> b{0.0, 0.25 * eps, 0.5 * eps};
  for (double d = eps; d < 0.5 * ell; d *= 2.0) b.push_back(d);
  b.push_back(0.5 * ell);
  b.push_back(0.75 * ell);
  b.push_back(ell);
  return b;
}

template <class F>
double integrate_panels(const std::vector<double>& b, F&& f) {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < b.size(); ++k) s += Gauss::integrate(f, b[k], b[k + 1]);
  return s;
}

}  // namespace

double sobolev_constant(int dim) {
  if (dim < 3) throw ConfigError("Sobolev constant needs N >= 3");
  const double n = dim;
  return n * (n - 2.0) * std::numbers::pi *
         std::pow(std::tgamma(n / 2.0) / std::tgamma(n), 2.0 / n);
}

double compactness_threshold(int dim) {
  return std::pow(sobolev_constant(dim), dim / 2.0) / dim;
}

CalculusMax calculus_max(double a, double b, int dim) {
  if (dim < 3) throw ConfigError("calculus_max needs N >= 3");
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw ConfigError("calculus_max needs A > 0 and B > 0");
  }
  const double n = dim;
  const double q = 2.0 * n / (n - 2.0);
  CalculusMax out;
  out.value = std::pow(a / std::pow(b, 2.0 / q), n / 2.0) / n;
  out.argmax = std::pow(a / b, 1.0 / (q - 2.0));
  return out;
}

InstantonParams InstantonParams::with_default_ell(double eps) {
  InstantonParams p;
  p.eps = eps;
  p.ell = std::pow(eps, 0.25);
  p.validate();
  return p;
}

void InstantonParams::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("instanton eps must be positive");
  if (!(ell > 0.0) || !(ell < 0.5)) throw ConfigError("instanton ell must lie in (0, 1/2)");
  if (eps > 0.25 * ell) throw ConfigError("instanton needs eps <= ell/4");
}

double cutoff(double d, double ell) {
  if (d <= 0.5 * ell) return 1.0;
  if (d >= ell) return 0.0;
  const double s = (d - 0.5 * ell) / (0.5 * ell);
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

double cutoff_derivative(double d, double ell) {
  if (d <= 0.5 * ell || d >= ell) return 0.0;
  const double s = (d - 0.5 * ell) / (0.5 * ell);
  return -6.0 * s * (1.0 - s) / (0.5 * ell);
}

InstantonField build_instanton(const InstantonParams& params, const GridPtr& grid,
                               const ProblemSpec& spec) {
  params.validate();
  if (spec.dim != grid->dim()) throw ConfigError("instanton: grid and problem dimensions differ");
  InstantonField out{Field(grid)};
  const double c = 1.0 - params.ell;
  for (int i = 0; i < grid->nr() - 1; ++i) {
    const double r = grid->r(i);
    for (int j = 0; j < grid->ntheta(); ++j) {
      const double d2 = r * r + c * c - 2.0 * r * c * std::cos(grid->theta(j));
      const double d = std::sqrt(std::max(d2, 0.0));
      out.u(i, j) = cutoff(d, params.ell) * bubble(d, params.eps, spec.dim);
    }
  }
  out.radially_resolved = grid->dr() <= 0.25 * params.eps;
  out.angularly_resolved = c * grid->dtheta() <= 0.25 * params.eps;
  return out;
}

SpikeIntegrals spike_integrals(const InstantonParams& params, int dim, double alpha) {
  params.validate();
  const double eps = params.eps;
  const double ell = params.ell;
  const double q = 2.0 * dim / (dim - 2.0);
  const double full = sphere_area(dim - 1);
  const auto b = panels(eps, ell);

  const auto u = [&](double d) { return cutoff(d, ell) * bubble(d, eps, dim); };
  const auto du = [&](double d) {
    return cutoff_derivative(d, ell) * bubble(d, eps, dim) +
           cutoff(d, ell) * bubble_derivative(d, eps, dim);
  };
  const auto jac = [&](double d) { return std::pow(d, dim - 1); };

  SpikeIntegrals s;
  s.dirichlet = full * integrate_panels(b, [&](double d) { return du(d) * du(d) * jac(d); });
  s.mass = full * integrate_panels(b, [&](double d) { return u(d) * u(d) * jac(d); });
  s.critical_0 =
      full * integrate_panels(b, [&](double d) { return std::pow(std::abs(u(d)), q) * jac(d); });
  if (alpha == 0.0) {
    s.critical_alpha = s.critical_0;
    return s;
  }
  // |x|² = c² + d² + 2cd cosψ about x_ℓ = (1 - ℓ) p
  const double c = 1.0 - ell;
  const double sub = sphere_area(dim - 2);
  const double pi = std::numbers::pi;
  const auto shell = [&](double d) {
    const auto g = [&](double psi) {
      const double x2 = c * c + d * d + 2.0 * c * d * std::cos(psi);
      return std::pow(x2, 0.5 * alpha) * std::pow(std::sin(psi), dim - 2);
    };
    const double ang = Gauss::integrate(g, 0.0, 0.5 * pi) + Gauss::integrate(g, 0.5 * pi, pi);
    return sub * ang * std::pow(std::abs(u(d)), q) * jac(d);
  };
  s.critical_alpha = integrate_panels(b, shell);
  return s;
}

InstantonReport instanton_report(const InstantonParams& params, const SubspaceSplit& split,
                                 const Problem& p) {
  InstantonReport rep;
  rep.params = params;
  rep.lambda = p.spec.lambda;
  rep.alpha = p.spec.alpha;
  rep.threshold = compactness_threshold(p.spec.dim);

  const SpikeIntegrals s = spike_integrals(params, p.spec.dim, p.spec.alpha);
  rep.dirichlet = s.dirichlet;
  rep.mass = s.mass;
  rep.critical_alpha = s.critical_alpha;
  rep.critical_0 = s.critical_0;
  rep.rayleigh = (s.dirichlet - p.spec.lambda * s.mass) /
                 std::pow(s.critical_alpha, 2.0 / p.crit_exp());

  const InstantonField field = build_instanton(params, p.grid, p.spec);
  rep.radially_resolved = field.radially_resolved;
  rep.angularly_resolved = field.angularly_resolved;
  const EnergyBreakdown e = energy(field.u, p);
  rep.grid_dirichlet = e.dirichlet;
  rep.grid_mass = e.mass;
  rep.grid_critical = e.critical;

  try {
    const NehariPoint pt = project_to_nehari(remove_Z(field.u, split, p.weights), split, p);
    rep.fiber_max = pt.phi;
    rep.below_threshold = pt.phi < rep.threshold;
  } catch (const Error& ex) {
    rep.projection_ok = false;
    rep.failure = ex.what();
    rep.fiber_max = std::nan("");
  }
  return rep;
}

ThresholdVerdict verify_threshold(const SubspaceSplit& split, const Problem& p,
                                  const std::vector<double>& eps_grid, double margin) {
  if (eps_grid.empty()) throw ConfigError("threshold check needs at least one eps");
  if (!(margin >= 0.0)) throw ConfigError("threshold margin must be nonnegative");
  ThresholdVerdict v;
  v.margin = margin;
  v.threshold = compactness_threshold(p.spec.dim);
  double best = 0.0;
  for (double eps : eps_grid) {
    InstantonReport rep = instanton_report(InstantonParams::with_default_ell(eps), split, p);
    if (!rep.projection_ok) {
      ++v.failures;
    } else if (rep.fiber_max < v.threshold - margin && (!v.witness_eps || rep.fiber_max < best)) {
      v.witness_eps = eps;
      best = rep.fiber_max;
    }
    v.reports.push_back(std::move(rep));
  }
  v.holds = v.witness_eps.has_value();
  return v;
}

std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  const std::size_t n = x.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!(x[k] > 0.0) || !(y[k] > 0.0)) return std::nullopt;
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / den;
}

SweepFit fit_sweep(const std::vector<InstantonReport>& reports, int dim) {
  SweepFit fit;
  if (dim == 4) return fit;
  const double S = sobolev_constant(dim);
  std::vector<double> eps, deficit, mass;
  for (const auto& r : reports) {
    eps.push_back(r.params.eps);
    deficit.push_back(S - r.rayleigh);
    mass.push_back(r.mass);
  }
  fit.deficit_slope = loglog_slope(eps, deficit);
  fit.mass_slope = loglog_slope(eps, mass);
  return fit;
}

}  // namespace henon
