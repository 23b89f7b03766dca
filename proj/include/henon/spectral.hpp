#pragma once

// Reduced Dirichlet Laplacian, its lowest eigenpairs and the splitting
// H = Z ⊕ Y.
//
// The finite-volume stiffness matrix is separable: K = ω (K_r ⊗ S_θ + R ⊗ K_θ)
// with mass W = ω (V_r ⊗ S_θ). Diagonalising the small angular pencil
// (K_θ, S_θ) once reduces both Poisson solves and eigenproblems to
// independent tridiagonal radial problems, one per angular mode.

#include <Eigen/Dense>
#include <vector>

#include "henon/error.hpp"
#include "henon/grid.hpp"

namespace henon {

class Operator {
 public:
  static Operator assemble(const GridPtr& grid, const Weights& weights);

  const GridPtr& grid() const { return grid_; }
  const Weights& weights() const { return weights_; }

  /// K u on the interior rows; zero on the r = 1 row.
  Field stiffness(const Field& u) const;
  /// -Δ_h u = W^{-1} K u (interior), zero on the boundary row.
  Field apply(const Field& u) const;
  /// (-Δ_h)^{-1} f, i.e. K^{-1} W f with the Dirichlet row set to zero.
  Field solve(const Field& f) const;
  /// K^{-1} b for a right-hand side already in stiffness (dual) form.
  Field solve_stiffness(const Field& b) const;

  /// Angular eigenvalues μ_q (ascending) and S_θ-orthonormal modes (columns).
  const Eigen::VectorXd& angular_eigenvalues() const { return mu_; }
  const Eigen::MatrixXd& angular_modes() const { return modes_; }

  /// Radial tridiagonal pencil for angular mode q: diag/offdiag of K_r + μ_q R, and V_r.
  void radial_pencil(int q, Eigen::VectorXd& diag, Eigen::VectorXd& off,
                     Eigen::VectorXd& vol) const;

 private:
  GridPtr grid_;
  Weights weights_;
  double omega_ = 1.0;
  Eigen::VectorXd mu_;
  Eigen::MatrixXd modes_;       // nθ x nθ, columns are modes
  Eigen::VectorXd kr_diag_;     // K_r diagonal (interior rows)
  Eigen::VectorXd kr_off_;      // K_r off-diagonal
  Eigen::VectorXd rad_r2_;      // R_i = ∫ r^{N-3} dr per cell
  Eigen::VectorXd rad_vol_;     // V_i = ∫ r^{N-1} dr per cell
  std::vector<double> lower_;   // LDLᵀ factors of ω(K_r + μ_q R), row-major (i, q)
  std::vector<double> inv_diag_;
};

struct Spectrum {
  std::vector<double> eigvals;  ///< ascending
  std::vector<Field> eigfields; ///< L²(W)-orthonormal
  std::vector<int> angular_mode;
  std::vector<int> radial_index;
  double max_residual = 0.0;    ///< max_j ‖A e_j - λ_j e_j‖ / λ_j
};

/// Lowest k eigenpairs of the reduced Dirichlet Laplacian. Eigenfields are
/// normalised so that their largest-magnitude value is positive.
/// Throws ConfigError for k < 1 or k above half the unknown count, and
/// NumericalError if an eigenpair fails the residual check.
Spectrum dirichlet_spectrum(const Operator& op, int k);

/// Relative tolerance for λ = λ_m ties.
inline constexpr double kEigenTieTol = 1e-8;

struct SubspaceSplit {
  int m = 0;
  double lambda = 0.0;
  std::vector<Field> z_basis;     ///< L²-orthonormal, first m eigenfields
  std::vector<double> z_eigvals;  ///< λ_1..λ_m
  double next_eigval = 0.0;       ///< λ_{m+1}
};

/// Thrown when the spectrum cannot certify λ < λ_{m+1}.
class SpectrumTooShort : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// m = #{j : λ_j <= λ (1 + tie tol)}. For N = 4 a λ equal to any computed
/// eigenvalue (within the tie tolerance) is rejected.
SubspaceSplit split_space(const ProblemSpec& spec, const Spectrum& spectrum);

/// L²-coordinates of the projection of u onto Z (equal to the H-orthogonal
/// projection because Z is spanned by eigenfields).
std::vector<double> project_Z(const Field& u, const SubspaceSplit& split, const Weights& weights);

/// u minus its projection onto Z.
Field remove_Z(const Field& u, const SubspaceSplit& split, const Weights& weights);

}  // namespace henon
