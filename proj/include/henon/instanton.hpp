#pragma once

// Cut-off Aubin–Talenti bubbles spiked near the boundary, the Sobolev
// constant, and the energy-threshold checks built on them.
//
//   U(x) = (N(N-2))^{(N-2)/4} ε^{(N-2)/2} / (ε² + |x - x_ℓ|²)^{(N-2)/2}
//   u = ξ_ℓ U,   x_ℓ = (1 - ℓ) p,   ξ_ℓ = 1 on B(x_ℓ, ℓ/2), 0 off B(x_ℓ, ℓ)
//
// The cut-off is the cubic smoothstep in d = |x - x_ℓ|, so |∇ξ_ℓ| ≤ 3/ℓ.

#include <optional>
#include <string>
#include <vector>

#include "henon/nehari.hpp"

namespace henon {

/// Best constant of the Sobolev embedding D^{1,2} ⊂ L^{2*} in R^N:
/// N(N-2)π (Γ(N/2)/Γ(N))^{2/N}.
double sobolev_constant(int dim);

/// (1/N) S^{N/2}, the compactness threshold for the level c.
double compactness_threshold(int dim);

struct CalculusMax {
  double value = 0.0;   ///< max_{t>0} ½At² − (1/2*)Bt^{2*} = (1/N)(A/B^{2/2*})^{N/2}
  double argmax = 0.0;  ///< (A/B)^{1/(2*-2)}
};

/// Throws ConfigError unless A > 0 and B > 0.
CalculusMax calculus_max(double a, double b, int dim);

struct InstantonParams {
  double eps = 0.05;
  double ell = 0.0;

  /// ℓ = ε^{1/4}.
  static InstantonParams with_default_ell(double eps);
  /// Throws ConfigError unless 0 < ε ≤ ℓ/4 and ℓ < 1/2.
  void validate() const;
};

/// Cubic-smoothstep cut-off and its derivative in d.
double cutoff(double d, double ell);
double cutoff_derivative(double d, double ell);

struct InstantonField {
  Field u;
  bool radially_resolved = true;   ///< dr ≤ ε/4
  bool angularly_resolved = true;  ///< (1-ℓ) dθ ≤ ε/4
};

/// ξ_ℓ U_{ε,ℓ} sampled on the grid, spike on the θ = 0 axis at r = 1 - ℓ.
InstantonField build_instanton(const InstantonParams& params, const GridPtr& grid,
                               const ProblemSpec& spec);

/// Instanton integrals by a spike-resolving quadrature in local spherical
/// coordinates about x_ℓ (geometric Gauss–Legendre panels in d).
struct SpikeIntegrals {
  double dirichlet = 0.0;
  double mass = 0.0;
  double critical_alpha = 0.0;
  double critical_0 = 0.0;
};
SpikeIntegrals spike_integrals(const InstantonParams& params, int dim, double alpha);

struct InstantonReport {
  InstantonParams params;
  double lambda = 0.0;
  double alpha = 0.0;
  double dirichlet = 0.0;       ///< spike quadrature
  double mass = 0.0;
  double critical_alpha = 0.0;
  double critical_0 = 0.0;
  double rayleigh = 0.0;        ///< (dirichlet − λ mass) / critical_alpha^{2/2*}
  double grid_dirichlet = 0.0;  ///< same integrals of the grid-sampled field
  double grid_mass = 0.0;
  double grid_critical = 0.0;
  double fiber_max = 0.0;       ///< max_{t>0, w∈Z} φ(tu + w) on the grid
  double threshold = 0.0;
  bool below_threshold = false;
  bool radially_resolved = true;
  bool angularly_resolved = true;
  bool projection_ok = true;
  std::string failure;
};

InstantonReport instanton_report(const InstantonParams& params, const SubspaceSplit& split,
                                 const Problem& p);

struct ThresholdVerdict {
  bool holds = false;
  std::optional<double> witness_eps;
  double margin = 0.0;
  double threshold = 0.0;
  std::vector<InstantonReport> reports;
  int failures = 0;  ///< ε values whose fiber projection failed
};

/// True iff some ε gives fiber_max < threshold − margin. Throws ConfigError for
/// an empty ε list or a negative margin.
ThresholdVerdict verify_threshold(const SubspaceSplit& split, const Problem& p,
                                  const std::vector<double>& eps_grid, double margin = 0.0);

/// Least-squares slope of log y against log x; nullopt if any value is ≤ 0.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct SweepFit {
  std::optional<double> deficit_slope;  ///< of S − rayleigh against ε
  std::optional<double> mass_slope;     ///< of ∫u² against ε
};

/// Not fitted for N = 4, whose instanton asymptotics differ.
SweepFit fit_sweep(const std::vector<InstantonReport>& reports, int dim);

}  // namespace henon
