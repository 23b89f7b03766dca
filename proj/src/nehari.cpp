#include "henon/nehari.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "henon/diagnostics.hpp"
#include "henon/error.hpp"
#include "henon/instanton.hpp"
#include "henon/simd/kernels.hpp"

namespace henon {
namespace {

// φ restricted to the fiber {Σ x_a b_a} with b_0 = v, b_j = e_j.
class FiberModel {
 public:
  FiberModel(const Field& v, const SubspaceSplit& split, const Problem& p)
      : p_(p), dim_(split.m + 1), u_(p.grid), wp_(p.grid->size()), pot_(p.grid->size()) {
    basis_.push_back(&v);
    for (const Field& e : split.z_basis) basis_.push_back(&e);
    quad_.resize(dim_, dim_);
    gram_h_.resize(dim_, dim_);
    for (int a = 0; a < dim_; ++a) {
      for (int b = a; b < dim_; ++b) {
        const double h = h_inner(*basis_[a], *basis_[b], p.weights);
        const double l2 = l2_inner(*basis_[a], *basis_[b], p.weights);
        gram_h_(a, b) = gram_h_(b, a) = h;
        quad_(a, b) = quad_(b, a) = h - p.spec.lambda * l2;
      }
    }
    z_eigvals_ = split.z_eigvals;
  }

  int dim() const { return dim_; }
  const Eigen::MatrixXd& quad() const { return quad_; }

  /// Evaluates φ, gradient and Hessian at coordinates x.
  void eval(const Eigen::VectorXd& x, double& phi, Eigen::VectorXd& grad, Eigen::MatrixXd* hess) {
    assemble(x);
    const auto& k = simd::active_kernels();
    const std::size_t n = u_.size();
    const double ps = p_.crit_exp();
    k.abs_pow(u_.data(), p_.r_alpha.data(), ps - 2.0, pot_.data(), n);
    for (std::size_t i = 0; i < n; ++i) wp_[i] = p_.weights.w[i] * pot_[i];

    const double crit = k.dot3(u_.data(), u_.data(), wp_.data(), n);
    phi = 0.5 * x.dot(quad_ * x) - crit / ps;
    grad = quad_ * x;
    for (int a = 0; a < dim_; ++a) grad[a] -= k.dot3(u_.data(), basis_[a]->data(), wp_.data(), n);
    if (hess) {
      *hess = quad_;
      for (int a = 0; a < dim_; ++a) {
        for (int b = a; b < dim_; ++b) {
          const double nl = (ps - 1.0) * k.dot3(basis_[a]->data(), basis_[b]->data(), wp_.data(), n);
          (*hess)(a, b) -= nl;
          if (b != a) (*hess)(b, a) -= nl;
        }
      }
    }
  }

  double phi(const Eigen::VectorXd& x) {
    assemble(x);
    const double crit = simd::active_kernels().abs_pow_sum(u_.data(), p_.alpha_weight.data(),
                                                           p_.crit_exp(), u_.size());
    return 0.5 * x.dot(quad_ * x) - crit / p_.crit_exp();
  }

  /// Same scale-free measure as ConstraintValue::residual(), from the fiber gradient.
  double residual(const Eigen::VectorXd& x, const Eigen::VectorXd& grad) const {
    ConstraintValue cv;
    cv.s = x.dot(grad);
    double qn2 = 0.0;
    for (int j = 1; j < dim_; ++j) qn2 += grad[j] * grad[j] / z_eigvals_[j - 1];
    cv.qg_h_norm = std::sqrt(qn2);
    cv.u_h_norm = std::sqrt(std::max(x.dot(gram_h_ * x), 0.0));
    return cv.residual();
  }

  Field field(const Eigen::VectorXd& x) {
    assemble(x);
    return u_;
  }

  /// B = Σ|x|^α|v|^{2*} for the pure v direction.
  double critical_of_v() const {
    return simd::active_kernels().abs_pow_sum(basis_[0]->data(), p_.alpha_weight.data(),
                                              p_.crit_exp(), basis_[0]->size());
  }

 private:
  void assemble(const Eigen::VectorXd& x) {
    double* out = u_.data();
    const std::size_t n = u_.size();
    const double* b0 = basis_[0]->data();
    for (std::size_t i = 0; i < n; ++i) out[i] = x[0] * b0[i];
    for (int a = 1; a < dim_; ++a) {
      const double* b = basis_[a]->data();
      const double c = x[a];
      for (std::size_t i = 0; i < n; ++i) out[i] += c * b[i];
    }
  }

  const Problem& p_;
  int dim_;
  std::vector<const Field*> basis_;
  Eigen::MatrixXd quad_;
  Eigen::MatrixXd gram_h_;
  std::vector<double> z_eigvals_;
  Field u_;
  std::vector<double> wp_;
  std::vector<double> pot_;
};

// Maximises over w for fixed t = x[0] (strictly concave in w); returns φ.
double maximize_w(FiberModel& model, Eigen::VectorXd& x) {
  const int d = model.dim();
  double phi = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  for (int it = 0; it < 40 && d > 1; ++it) {
    model.eval(x, phi, g, &h);
    const Eigen::VectorXd gw = g.tail(d - 1);
    if (gw.norm() <= 1e-14 * std::max(1.0, x.norm())) break;
    Eigen::MatrixXd hw = h.bottomRightCorner(d - 1, d - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hw);
    const double top = es.eigenvalues().maxCoeff();
    if (top >= 0.0) hw -= (top + 1e-8 * std::max(1.0, hw.norm())) * Eigen::MatrixXd::Identity(d - 1, d - 1);
    const Eigen::VectorXd step = -hw.ldlt().solve(gw);
    double s = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 40; ++bt) {
      Eigen::VectorXd trial = x;
      trial.tail(d - 1) += s * step;
      if (model.phi(trial) >= phi) {
        x = trial;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) break;
  }
  return model.phi(x);
}

struct NewtonOutcome {
  bool ok = false;
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
};

NewtonOutcome fiber_newton(FiberModel& model, Eigen::VectorXd& x, const ProjectionOptions& opts,
                           double t_floor) {
  NewtonOutcome out;
  const int d = model.dim();
  double phi = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;
  model.eval(x, phi, g, &h);
  for (int it = 0; it < opts.max_newton; ++it) {
    out.iterations = it;
    out.residual = model.residual(x, g);
    if (out.residual <= opts.tol) {
      out.ok = true;
      return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const double top = es.eigenvalues().maxCoeff();
    const bool concave = top < 0.0;
    Eigen::MatrixXd hs = h;
    if (!concave) hs -= (top + 1e-6 * std::max(1.0, h.norm())) * Eigen::MatrixXd::Identity(d, d);
    const Eigen::VectorXd step = -hs.ldlt().solve(g);

    const double merit = g.squaredNorm();
    double s = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 50; ++bt) {
      Eigen::VectorXd trial = x + s * step;
      if (trial[0] > std::max(0.1 * x[0], t_floor)) {
        double phi_t = 0.0;
        Eigen::VectorXd g_t;
        Eigen::MatrixXd h_t;
        model.eval(trial, phi_t, g_t, &h_t);
        const bool merit_ok = g_t.squaredNorm() <= (1.0 - 1e-4 * s) * merit;
        const bool ascent_ok = !concave && phi_t > phi;
        if (merit_ok || ascent_ok) {
          x = trial;
          phi = phi_t;
          g = g_t;
          h = h_t;
          accepted = true;
          break;
        }
      }
      s *= 0.5;
    }
    if (!accepted) break;
  }
  out.residual = model.residual(x, g);
  out.ok = out.residual <= opts.tol;
  return out;
}

}  // namespace

NehariPoint project_to_nehari(const Field& v_in, const SubspaceSplit& split, const Problem& p,
                              const ProjectionOptions& opts, const NehariPoint* warm) {
  require_same_grid(*v_in.grid(), *p.grid);
  Field v = remove_Z(v_in, split, p.weights);
  v.apply_dirichlet();
  const double vn = h_norm(v, p);
  const double in_norm = h_norm(v_in, p);
  if (!(vn > 1e-12 * std::max(1.0, in_norm))) {
    throw ConfigError("direction lies in span(Z); it has no Y-component");
  }
  v *= 1.0 / vn;

  FiberModel model(v, split, p);
  const int d = model.dim();
  const double a = model.quad()(0, 0);
  const double b = model.critical_of_v();
  const double ps = p.crit_exp();
  if (!(b > 0.0)) throw NumericalError("direction has zero critical integral", 0, 0.0);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  const double t_closed = a > 0.0 ? std::pow(a / b, 1.0 / (ps - 2.0)) : 1.0;
  if (warm && warm->f > 0.0 && static_cast<int>(warm->g_coords.size()) == d - 1) {
    x[0] = warm->f;
    for (int j = 1; j < d; ++j) x[j] = warm->g_coords[j - 1];
  } else {
    x[0] = t_closed;
  }
  const double t_floor = 1e-10 * t_closed;

  NewtonOutcome res = fiber_newton(model, x, opts, t_floor);
  int total_iters = res.iterations;
  bool fallback = false;
  if (!res.ok) {
    // log-spaced scan in t with w maximised at each t, then Newton again
    fallback = true;
    double best_phi = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best = x;
    for (int k = 0; k <= 60; ++k) {
      Eigen::VectorXd trial = Eigen::VectorXd::Zero(d);
      trial[0] = std::pow(10.0, -3.0 + 6.0 * k / 60.0);
      const double ph = maximize_w(model, trial);
      if (ph > best_phi) {
        best_phi = ph;
        best = trial;
      }
    }
    x = best;
    res = fiber_newton(model, x, opts, t_floor);
    total_iters += res.iterations;
  }
  if (!(x[0] > t_floor)) {
    throw NumericalError("fiber has no positive maximum (t driven to 0)", total_iters, res.residual);
  }
  if (!res.ok) throw NumericalError("fiber projection did not converge", total_iters, res.residual);

  NehariPoint pt;
  pt.u = model.field(x);
  pt.f = x[0];
  pt.g_coords.assign(x.data() + 1, x.data() + d);
  pt.residual = res.residual;
  pt.phi = model.phi(x);
  pt.v = std::move(v);  // model points at v; keep this last
  pt.newton_iterations = total_iters;
  pt.used_fallback = fallback;
  return pt;
}

Field initial_direction(const SubspaceSplit& split, const Problem& p, const SolverConfig& cfg) {
  Field seed(p.grid);
  if (cfg.init == InitialGuess::Instanton) {
    const InstantonParams params = InstantonParams::with_default_ell(cfg.seed_eps);
    seed = build_instanton(params, p.grid, p.spec).u;
  } else {
    std::mt19937_64 rng(cfg.seed);
    seed = random_smooth_field(p.grid, rng, 6, 6);
  }
  Field v = remove_Z(seed, split, p.weights);
  v.apply_dirichlet();
  const double n = h_norm(v, p);
  if (!(n > 0.0)) throw ConfigError("initial guess has no component in Y");
  v *= 1.0 / n;
  return v;
}

GroundStateReport minimize_over_Y(const SubspaceSplit& split, const Problem& p,
                                  const SolverConfig& cfg, const Field* initial) {
  if (!(cfg.tol_c > 0.0) || !(cfg.tol_g > 0.0) || cfg.max_iter < 1) {
    throw ConfigError("solver tolerances must be positive and max_iter >= 1");
  }
  GroundStateReport rep;
  rep.m = split.m;

  ProjectionOptions popts = cfg.projection;
  popts.tol = std::min(popts.tol, cfg.tol_c);

  Field v = initial ? *initial : initial_direction(split, p, cfg);
  NehariPoint pt = project_to_nehari(v, split, p, popts);
  v = pt.v;

  auto riemannian_gradient = [&](const NehariPoint& q, const Field& grad) {
    Field py = remove_Z(grad, split, p.weights);
    py.axpy(-h_inner(py, q.v, p.weights), q.v);
    py *= q.f;
    return py;
  };

  Field grad = h_gradient(pt.u, p);
  Field rgrad = riemannian_gradient(pt, grad);
  double rg2 = h_inner(rgrad, rgrad, p.weights);
  rep.energy_history.push_back(pt.phi);

  Field prev_v;
  Field prev_rgrad;
  bool have_prev = false;
  double tau = 0.0;
  int stalled = 0;
  int it = 0;
  rep.status = "max_iter";

  for (; it < cfg.max_iter; ++it) {
    const double gn = h_norm(grad, p);
    const double scale = std::max(1.0, h_norm(pt.u, p));
    if (gn <= cfg.tol_g * scale && pt.residual <= cfg.tol_c) {
      rep.converged = true;
      rep.status = "converged";
      break;
    }

    // Barzilai–Borwein step, capped so one step moves at most 0.2 on the sphere
    if (have_prev) {
      Field s = v - prev_v;
      Field y = rgrad - prev_rgrad;
      const double sy = h_inner(s, y, p.weights);
      const double ss = h_inner(s, s, p.weights);
      tau = sy > 0.0 ? ss / sy : 2.0 * tau;
    } else {
      tau = 1.0;
    }
    const double rgn = std::sqrt(rg2);
    tau = std::min(tau, 0.2 / std::max(rgn, 1e-300));

    bool accepted = false;
    NehariPoint next;
    for (int bt = 0; bt < 60; ++bt) {
      Field trial = v;
      trial.axpy(-tau, rgrad);
      try {
        next = project_to_nehari(trial, split, p, popts, &pt);
      } catch (const NumericalError&) {
        tau *= 0.5;
        continue;
      }
      if (next.phi <= pt.phi - 1e-4 * tau * rg2) {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      rep.status = "line_search_failed";
      break;
    }

    const double decrease = pt.phi - next.phi;
    stalled = decrease < 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(pt.phi) ? stalled + 1 : 0;

    prev_v = v;
    prev_rgrad = rgrad;
    have_prev = true;
    pt = std::move(next);
    v = pt.v;
    grad = h_gradient(pt.u, p);
    rgrad = riemannian_gradient(pt, grad);
    rg2 = h_inner(rgrad, rgrad, p.weights);
    rep.energy_history.push_back(pt.phi);

    if (stalled >= cfg.stall_window) {
      rep.status = "stalled";
      ++it;
      break;
    }
  }

  rep.iterations = it;
  Field u = pt.u;
  if (cfg.canonical_orientation) {
    const MonotoneDefect md = theta_monotonicity(u);
    if (!md.nonincreasing) {
      u = reflect_theta(u);
      rep.reflected = true;
    }
  }
  rep.u = u;
  // reflection flips odd angular modes, so read (f, g) back off the final u
  rep.g_coords = project_Z(u, split, p.weights);
  Field yv = remove_Z(u, split, p.weights);
  rep.f = h_norm(yv, p);
  yv *= 1.0 / rep.f;
  rep.v = std::move(yv);
  rep.level_c = energy(u, p).phi;
  const Field g_final = h_gradient(u, p);
  rep.grad_norm = h_norm(g_final, p);
  rep.grad_scale = std::max(1.0, h_norm(u, p));
  rep.constraint_residual = constraint_F(u, split, p).residual();
  rep.changes_sign = sign_change(u, p.weights).changes_sign;
  rep.theta_monotone_defect = theta_monotonicity(u).defect / std::max(u.max_abs(), 1e-300);
  return rep;
}

LevelValue level_c(const GroundStateReport& report) {
  return LevelValue{report.level_c, !report.converged};
}

}  // namespace henon
