#pragma once

#include <functional>
#include <vector>

#include "unduloid/quadrature.hpp"
#include "unduloid/types.hpp"

namespace unduloid {

enum class CriticalKind { Minimum, Maximum, Degenerate };

struct CriticalPoint {
  double t0 = 0.0;
  CriticalKind kind = CriticalKind::Degenerate;
  double v2 = 0.0;    // second derivative of the volume at t0
  double eta1 = 0.0;  // first derivative of the mean curvature at t0
};

// Richardson-extrapolated central difference of order 1 or 2 with an a
// posteriori error estimate.  noise_floor declares the relative accuracy of
// f evaluations; steps incompatible with it are refused (StepError), and an
// undeclared non-smooth signal raises NoisySignalError.
//
// Preconditions: 0 < h0 <= 1e-2 * t, order in {1, 2}, noise_floor >= 0.
Estimate derivative(const std::function<double(double)>& f, double t, int order,
                    double h0, double noise_floor = 0.0);

// Brent's method on a sign-changing bracket; throws RootBracketError when
// f(a) and f(b) do not straddle zero.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol = 1e-12);

// Derivatives of the scalar functionals with steps chosen to stay inside the
// admissible neck range and with the quadrature tolerance tightened to match
// the step (the step-cubed coupling required by `derivative`).
Estimate enclosed_volume_slope(double t, const SlabConfig& cfg, const QuadratureSpec& quad);
Estimate enclosed_volume_curvature(double t, const SlabConfig& cfg, const QuadratureSpec& quad);
Estimate mean_curvature_slope(double t, const SlabConfig& cfg, const QuadratureSpec& quad);
Estimate shape_invariant_slope(double t, const SlabConfig& cfg, const QuadratureSpec& quad);

// Locates the zeros of the volume slope on [t_lo, t_hi] from a uniform scan
// (steps >= 50) with sign-change brackets refined by brent_root to 1e-8.
// Nodes whose slope is not resolved above its own error bar contribute no
// bracket.  Results are sorted by decreasing t0; each carries the local
// second derivative, the mean-curvature slope, and a kind that downgrades to
// Degenerate when |v2| falls under 1e-4 of the largest curvature seen on the
// scan grid.
std::vector<CriticalPoint> find_critical_points(const SlabConfig& cfg,
                                                const QuadratureSpec& quad,
                                                double t_lo, double t_hi, int steps);

}  // namespace unduloid
