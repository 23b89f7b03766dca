#pragma once

// Reduced computational domain for axially symmetric functions on the unit
// N-ball: a cell-centred (r, theta) tensor grid, its quadrature weights and
// the finite-volume Dirichlet form.
//
// Layout: node (i, j) lives at index i * ntheta + j. Radial nodes are
// r_i = (i + 1/2) dr with dr = 1 / (nr - 1/2), so the last row sits exactly on
// r = 1 and carries the Dirichlet condition. Angular nodes are
// theta_j = (j + 1/2) pi / ntheta; with ntheta even, j -> ntheta - 1 - j is
// the exact reflection theta -> pi - theta.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace henon {

/// -Δu = λu + |x|^α |u|^{2*-2} u on the unit ball of R^N, u = 0 on the sphere.
struct ProblemSpec {
  int dim = 3;
  double lambda = 0.0;
  double alpha = 0.0;

  /// Validates dim >= 3, lambda >= 0, alpha >= 0 (all finite).
  static ProblemSpec make(int dim, double lambda, double alpha);

  double crit_exp() const { return 2.0 * dim / (dim - 2.0); }
};

/// Volume of the unit N-ball, π^{N/2} / Γ(N/2 + 1).
double ball_volume(int dim);

/// Surface measure of the unit k-sphere S^k in R^{k+1}.
double sphere_area(int k);

class Grid {
 public:
  static constexpr int kMinRadial = 8;
  static constexpr int kMinAngular = 4;

  /// Throws ConfigError for nr < 8, ntheta < 4 or odd ntheta.
  static std::shared_ptr<const Grid> build(const ProblemSpec& spec, int nr, int ntheta);

  int dim() const { return dim_; }
  int nr() const { return nr_; }
  int ntheta() const { return ntheta_; }
  double dr() const { return dr_; }
  double dtheta() const { return dtheta_; }

  std::size_t size() const { return static_cast<std::size_t>(nr_) * ntheta_; }
  /// Number of unknowns (every row except r = 1); they form a prefix of the layout.
  std::size_t interior_size() const { return static_cast<std::size_t>(nr_ - 1) * ntheta_; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * ntheta_ + j; }
  bool is_boundary_row(int i) const { return i == nr_ - 1; }

  std::span<const double> r_nodes() const { return r_; }
  std::span<const double> theta_nodes() const { return theta_; }

  double r(int i) const { return r_[i]; }
  double theta(int j) const { return theta_[j]; }

  bool same_shape(const Grid& other) const {
    return dim_ == other.dim_ && nr_ == other.nr_ && ntheta_ == other.ntheta_;
  }

 private:
  Grid(int dim, int nr, int ntheta);

  int dim_;
  int nr_;
  int ntheta_;
  double dr_;
  double dtheta_;
  std::vector<double> r_;
  std::vector<double> theta_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// A real value per grid node; the discrete stand-in for u in H^1_0.
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid);
  Field(GridPtr grid, std::vector<double> values);

  const GridPtr& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double& operator()(int i, int j) { return values_[grid_->index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_->index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  /// this += a * x
  Field& axpy(double a, const Field& x);

  /// Zero the r = 1 row.
  void apply_dirichlet();
  double max_abs() const;
  /// Largest |value| on the r = 1 row.
  double boundary_defect() const;
  bool all_finite() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Quadrature and Dirichlet-form coefficients for one grid.
///
/// Cell volumes are exact in r and midpoint in theta, times the measure of
/// S^{N-2}. The Dirichlet form sums squared differences over cell faces:
/// radial faces (pairs k, k + ntheta) and angular faces (pairs k, k + 1).
struct Weights {
  GridPtr grid;
  std::vector<double> w;
  std::vector<double> radial_face;   ///< size (nr-1)*ntheta, pairs (k, k+ntheta)
  std::vector<double> angular_face;  ///< size nr*ntheta-1, pairs (k, k+1); 0 across rows

  static Weights build(const GridPtr& grid);
  double total() const;
};

/// One-dimensional factors of the tensor-product measure and Dirichlet form.
struct AxisFactors {
  double omega = 0.0;              ///< |S^{N-2}|
  std::vector<double> vol;         ///< ∫ r^{N-1} dr per radial cell
  std::vector<double> vol_rinv2;   ///< ∫ r^{N-3} dr per radial cell
  std::vector<double> radial_face; ///< ρ^{N-1} / dr at the face between rows i and i+1
  std::vector<double> sin_cell;    ///< sin^{N-2}(θ_j) dθ (reflection-symmetric bitwise)
  std::vector<double> sin_face;    ///< sin^{N-2}(θ_{j+1/2}) / dθ; last entry (θ = π) is 0
};
AxisFactors axis_factors(const Grid& grid);

/// Throws ConfigError unless both objects refer to grids of the same shape.
void require_same_grid(const Grid& a, const Grid& b);

/// Σ f_i w_i
double integrate(const Field& f, const Weights& weights);

/// Σ u_i v_i w_i (the weighted L² product).
double l2_inner(const Field& u, const Field& v, const Weights& weights);

/// Σ r_i^α |u_i|^p w_i; requires p >= 1, alpha >= 0.
double weighted_power_integral(const Field& u, double p, double alpha, const Weights& weights);

/// Discrete Dirichlet product ∫ ∇u·∇v with |∇u|² = u_r² + r^{-2} u_θ².
double h_inner(const Field& u, const Field& v, const Weights& weights);

/// w_i * r_i^α, the per-node coefficient of the Hénon-weighted integrals.
std::vector<double> alpha_weighted(const Weights& weights, double alpha);

/// Smooth Dirichlet field Σ c_ab sin(aπ r) cos(bθ), a in [1, radial_modes],
/// b in [0, angular_modes), c_ab ~ N(0, 1) / (a b_1)^2 with b_1 = b + 1.
Field random_smooth_field(const GridPtr& grid, std::mt19937_64& rng, int radial_modes = 4,
                          int angular_modes = 4);

}  // namespace henon
