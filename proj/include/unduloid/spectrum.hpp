#pragma once

#include <utility>
#include <vector>

#include "unduloid/family.hpp"
#include "unduloid/quadrature.hpp"
#include "unduloid/types.hpp"

namespace unduloid {

// Finite-volume discretization of the stability operator
//
//   w  |->  ( -(p w')' + q0 w ) / m
//
// on the sampled profile, with natural (reflection) boundary conditions at
// both walls.  m is the lumped volume measure; the end cells are half-width,
// which keeps the discrete cylinder eigenfunctions exactly cosinusoidal.
struct DiscretizedOperator {
  SlabConfig cfg;
  double t = 1.0;
  double eta = 0.0;            // mean curvature of the underlying profile
  double dz = 0.0;             // uniform grid step
  std::vector<double> grid;    // N+1 nodes on [0, d]
  std::vector<double> p;       // nodal stiffness coefficient v^(n-1)/(1+v_z^2)^(3/2)
  std::vector<double> q0;      // nodal potential -(n-1) v^(n-3) / sqrt(1+v_z^2)
  std::vector<double> weight_m;  // lumped measure v^(n-1) * cell length
  std::vector<double> v;       // profile columns carried along for the
  std::vector<double> v_z;     // Rayleigh-quotient weight
};

// Builds the discrete operator from a sampled profile.  Requires at least
// 128 cells and consistent column lengths.
DiscretizedOperator assemble_operator(const ProfileSamples& samples,
                                      const SlabConfig& cfg);

// Second variation operator applied to nodal data: (T w) ./ m.
std::vector<double> apply_dh(const DiscretizedOperator& op,
                             const std::vector<double>& w);

// Volume-constrained operator: apply_dh with its weighted mean removed, so
// the result is m-orthogonal to constants.
std::vector<double> apply_constrained(const DiscretizedOperator& op,
                                      const std::vector<double>& w);

// Weighted mean and inner product of nodal data in the lumped measure m.
double weighted_mean(const DiscretizedOperator& op, const std::vector<double>& w);
double weighted_inner(const DiscretizedOperator& op, const std::vector<double>& a,
                      const std::vector<double>& b);

struct SpectrumResult {
  double t = 1.0;
  int N = 0;                                         // cell count of the grid
  std::vector<double> eigenvalues;                   // ascending
  std::vector<std::vector<double>> eigenfunctions;   // nodal, m-normalized
};

// k lowest eigenpairs of the constrained operator on the m-orthogonal
// complement of the constants.  1 <= k <= N/4.  Eigenfunctions come back
// m-normalized with a deterministic sign.
SpectrumResult eigen_spectrum(const DiscretizedOperator& op, int k);

// Rayleigh quotient of the second variation in its integrated-by-parts form:
// stiffness and potential sums over w against the area-weighted norm
// sum_i w_i^2 v^(n-1)/sqrt(1+v_z^2) c_i.  The numerator equals the quadratic
// form of apply_dh, so its sign matches the spectral verdict.
double quadratic_form_ratio(const DiscretizedOperator& op,
                            const std::vector<double>& w);

struct TrackedEigenvalue {
  double t = 0.0;
  double lambda = 0.0;
  double overlap = 1.0;  // weighted overlap with the previous node's mode
};

// Follows one eigenvalue branch over a uniform sweep of [t_range.first,
// t_range.second] by maximal weighted overlap of consecutive eigenfunctions.
// mode_index is 1-based in the ascending spectrum at the left endpoint.
// The sweep may extend slightly past the cylinder (t <= 1.05) so slopes
// through t = 1 can be fitted.  Loss of overlap below 0.8 raises
// BranchLossError.  steps >= 8.
std::vector<TrackedEigenvalue> track_eigenvalue(const SlabConfig& cfg,
                                                const QuadratureSpec& quad,
                                                std::pair<double, double> t_range,
                                                int steps, int mode_index);

struct SlopeComparison {
  double formula_value = 0.0;       // -V'' eta' / (n omega_n int v_t^2 v^(n-1))
  double continuation_value = 0.0;  // least-squares slope of the tracked branch
};

// At a critical neck parameter t0 of the volume (|V'(t0)| must vanish within
// its error bar), compares the exchange-of-stability slope formula with the
// slope of the crossing eigenvalue branch fitted over t0 +/- 1e-2.  The
// discretization uses N cells.  A second derivative of the volume that is
// not resolved above noise raises DegenerateCriticalError.
SlopeComparison eigenvalue_slope_at_critical(double t0, const SlabConfig& cfg,
                                             const QuadratureSpec& quad, int N);

}  // namespace unduloid
