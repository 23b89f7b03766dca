#include "henon/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include "henon/error.hpp"
#include "henon/simd/kernels.hpp"

namespace henon {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Symmetric tridiagonal eigenproblem (ascending); throws on QL failure.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tridiag_eigen(const Eigen::VectorXd& diag,
                                                             const Eigen::VectorXd& sub,
                                                             bool vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("tridiagonal eigensolver did not converge", static_cast<int>(diag.size()),
                         0.0);
  }
  return es;
}

}  // namespace

Operator Operator::assemble(const GridPtr& grid, const Weights& weights) {
  require_same_grid(*grid, *weights.grid);
  const AxisFactors f = axis_factors(*grid);
  const int nri = grid->nr() - 1;
  const int nt = grid->ntheta();

  Operator op;
  op.grid_ = grid;
  op.weights_ = weights;
  op.omega_ = f.omega;

  // angular pencil (K_θ, S_θ), symmetrised by S_θ^{-1/2}
  Eigen::VectorXd sdiag(nt), ssub(nt - 1), s_inv_sqrt(nt);
  for (int j = 0; j < nt; ++j) {
    const double left = j > 0 ? f.sin_face[j - 1] : 0.0;
    const double right = f.sin_face[j];
    sdiag[j] = (left + right) / f.sin_cell[j];
    s_inv_sqrt[j] = 1.0 / std::sqrt(f.sin_cell[j]);
  }
  for (int j = 0; j + 1 < nt; ++j) {
    ssub[j] = -f.sin_face[j] / std::sqrt(f.sin_cell[j] * f.sin_cell[j + 1]);
  }
  const auto ang = tridiag_eigen(sdiag, ssub, true);
  op.mu_ = ang.eigenvalues();
  op.modes_ = s_inv_sqrt.asDiagonal() * ang.eigenvectors();
  // deterministic orientation of each mode
  for (int q = 0; q < nt; ++q) {
    Eigen::Index arg = 0;
    op.modes_.col(q).cwiseAbs().maxCoeff(&arg);
    if (op.modes_(arg, q) < 0.0) op.modes_.col(q) *= -1.0;
  }

  op.kr_diag_.resize(nri);
  op.kr_off_.resize(std::max(nri - 1, 0));
  op.rad_r2_.resize(nri);
  op.rad_vol_.resize(nri);
  for (int i = 0; i < nri; ++i) {
    op.kr_diag_[i] = (i > 0 ? f.radial_face[i - 1] : 0.0) + f.radial_face[i];
    if (i + 1 < nri) op.kr_off_[i] = -f.radial_face[i];
    op.rad_r2_[i] = f.vol_rinv2[i];
    op.rad_vol_[i] = f.vol[i];
  }

  // LDLᵀ of ω (K_r + μ_q R) for every mode, stored (i, q) row-major
  op.lower_.assign(static_cast<std::size_t>(nri) * nt, 0.0);
  op.inv_diag_.assign(static_cast<std::size_t>(nri) * nt, 0.0);
  for (int q = 0; q < nt; ++q) {
    const double mu = std::max(op.mu_[q], 0.0);
    double d_prev = 0.0;
    for (int i = 0; i < nri; ++i) {
      double d = f.omega * (op.kr_diag_[i] + mu * op.rad_r2_[i]);
      if (i > 0) {
        const double e = f.omega * op.kr_off_[i - 1];
        const double l = e / d_prev;
        op.lower_[static_cast<std::size_t>(i) * nt + q] = l;
        d -= l * e;
      }
      op.inv_diag_[static_cast<std::size_t>(i) * nt + q] = 1.0 / d;
      d_prev = d;
    }
  }
  return op;
}

void Operator::radial_pencil(int q, Eigen::VectorXd& diag, Eigen::VectorXd& off,
                             Eigen::VectorXd& vol) const {
  const double mu = std::max(mu_[q], 0.0);
  diag = kr_diag_ + mu * rad_r2_;
  off = kr_off_;
  vol = rad_vol_;
}

Field Operator::stiffness(const Field& u) const {
  require_same_grid(*u.grid(), *grid_);
  const auto& k = simd::active_kernels();
  Field out(grid_);
  const std::size_t nt = static_cast<std::size_t>(grid_->ntheta());
  k.face_apply(u.data(), weights_.radial_face.data(), nt, weights_.radial_face.size(), out.data());
  k.face_apply(u.data(), weights_.angular_face.data(), 1, weights_.angular_face.size(), out.data());
  out.apply_dirichlet();
  return out;
}

Field Operator::apply(const Field& u) const {
  Field out = stiffness(u);
  const std::size_t n = grid_->interior_size();
  for (std::size_t k = 0; k < n; ++k) out[k] /= weights_.w[k];
  return out;
}

Field Operator::solve_stiffness(const Field& b) const {
  require_same_grid(*b.grid(), *grid_);
  const int nri = grid_->nr() - 1;
  const int nt = grid_->ntheta();
  Eigen::Map<const RowMatrix> rhs(b.data(), nri, nt);
  RowMatrix coeff = rhs * modes_;
  simd::active_kernels().tridiag_solve(lower_.data(), inv_diag_.data(), coeff.data(),
                                       static_cast<std::size_t>(nri), static_cast<std::size_t>(nt));
  Field out(grid_);
  Eigen::Map<RowMatrix> x(out.data(), nri, nt);
  x.noalias() = coeff * modes_.transpose();
  return out;
}

Field Operator::solve(const Field& f) const {
  require_same_grid(*f.grid(), *grid_);
  Field b(grid_);
  const std::size_t n = grid_->interior_size();
  for (std::size_t k = 0; k < n; ++k) b[k] = weights_.w[k] * f[k];
  return solve_stiffness(b);
}

// ---------------------------------------------------------------------------

Spectrum dirichlet_spectrum(const Operator& op, int k) {
  const GridPtr& grid = op.grid();
  const int nri = grid->nr() - 1;
  const int nt = grid->ntheta();
  const std::size_t unknowns = grid->interior_size();
  if (k < 1) throw ConfigError("number of eigenpairs must be >= 1");
  if (static_cast<std::size_t>(k) > unknowns / 2) {
    throw ConfigError("requested " + std::to_string(k) + " eigenpairs; at most " +
                      std::to_string(unknowns / 2) + " allowed on this grid");
  }

  struct Candidate {
    double value;
    int mode;
    int index;
    Eigen::VectorXd radial;  // c_i with Σ V_i c_i² = 1
  };
  std::vector<Candidate> cand;

  for (int q = 0; q < nt; ++q) {
    Eigen::VectorXd diag, off, vol;
    op.radial_pencil(q, diag, off, vol);
    const Eigen::VectorXd vis = vol.cwiseSqrt().cwiseInverse();
    Eigen::VectorXd d = diag.cwiseProduct(vis).cwiseProduct(vis);
    Eigen::VectorXd s(std::max(nri - 1, 0));
    for (int i = 0; i + 1 < nri; ++i) s[i] = off[i] * vis[i] * vis[i + 1];

    // modes are ascending in μ_q, so this mode's lowest value bounds the rest
    if (static_cast<int>(cand.size()) >= k) {
      std::vector<double> vals;
      for (const auto& c : cand) vals.push_back(c.value);
      std::nth_element(vals.begin(), vals.begin() + (k - 1), vals.end());
      const double kth = vals[k - 1];
      const auto lowest = tridiag_eigen(d, s, false).eigenvalues()[0];
      if (lowest > kth * (1.0 + 1e-12)) break;
    }
    const auto es = tridiag_eigen(d, s, true);
    const int take = std::min(k, nri);
    for (int idx = 0; idx < take; ++idx) {
      cand.push_back({es.eigenvalues()[idx], q, idx, vis.cwiseProduct(es.eigenvectors().col(idx))});
    }
  }

  std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.value, a.mode, a.index) < std::tie(b.value, b.mode, b.index);
  });
  cand.resize(static_cast<std::size_t>(k));

  Spectrum out;
  const double inv_sqrt_omega = 1.0 / std::sqrt(sphere_area(grid->dim() - 2));
  const Eigen::MatrixXd& modes = op.angular_modes();
  for (const Candidate& c : cand) {
    Field e(grid);
    for (int i = 0; i < nri; ++i) {
      for (int j = 0; j < nt; ++j) e(i, j) = c.radial[i] * modes(j, c.mode) * inv_sqrt_omega;
    }
    std::size_t arg = 0;
    for (std::size_t t = 1; t < e.size(); ++t) {
      if (std::fabs(e[t]) > std::fabs(e[arg])) arg = t;
    }
    if (e[arg] < 0.0) e *= -1.0;

    Field res = op.apply(e);
    res.axpy(-c.value, e);
    const double rel = std::sqrt(l2_inner(res, res, op.weights())) / c.value;
    out.max_residual = std::max(out.max_residual, rel);
    if (!(rel <= 1e-8)) {
      throw NumericalError("eigenpair residual check failed for eigenvalue " + std::to_string(c.value),
                           static_cast<int>(out.eigvals.size()), rel);
    }
    out.eigvals.push_back(c.value);
    out.eigfields.push_back(std::move(e));
    out.angular_mode.push_back(c.mode);
    out.radial_index.push_back(c.index);
  }
  return out;
}

SubspaceSplit split_space(const ProblemSpec& spec, const Spectrum& spectrum) {
  const double lambda = spec.lambda;
  if (spec.dim == 4) {
    for (double ev : spectrum.eigvals) {
      if (std::fabs(lambda - ev) <= kEigenTieTol * ev) {
        throw ConfigError("N = 4 requires lambda not to be a Dirichlet eigenvalue (lambda = " +
                          std::to_string(lambda) + ")");
      }
    }
  }
  SubspaceSplit split;
  split.lambda = lambda;
  std::size_t j = 0;
  while (j < spectrum.eigvals.size() && spectrum.eigvals[j] <= lambda + kEigenTieTol * spectrum.eigvals[j]) {
    ++j;
  }
  if (j == spectrum.eigvals.size()) {
    throw SpectrumTooShort("spectrum has " + std::to_string(spectrum.eigvals.size()) +
                           " eigenvalues, none above lambda = " + std::to_string(lambda) +
                           "; request more eigenpairs");
  }
  split.m = static_cast<int>(j);
  split.next_eigval = spectrum.eigvals[j];
  for (std::size_t t = 0; t < j; ++t) {
    split.z_basis.push_back(spectrum.eigfields[t]);
    split.z_eigvals.push_back(spectrum.eigvals[t]);
  }
  return split;
}

std::vector<double> project_Z(const Field& u, const SubspaceSplit& split, const Weights& weights) {
  std::vector<double> c(split.z_basis.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = l2_inner(u, split.z_basis[j], weights);
  return c;
}

Field remove_Z(const Field& u, const SubspaceSplit& split, const Weights& weights) {
  Field out = u;
  const auto c = project_Z(u, split, weights);
  for (std::size_t j = 0; j < c.size(); ++j) out.axpy(-c[j], split.z_basis[j]);
  return out;
}

}  // namespace henon
