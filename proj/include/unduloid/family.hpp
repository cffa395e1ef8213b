#pragma once

#include <optional>
#include <vector>

#include "unduloid/quadrature.hpp"
#include "unduloid/types.hpp"

namespace unduloid {

// Sampled profile on a uniform z-grid for one value of the neck parameter.
struct ProfileSamples {
  FamilyParam t;
  std::vector<double> grid;  // N+1 nodes on [0, d]
  std::vector<double> v;     // radius
  std::vector<double> v_z;   // slope
  std::vector<double> v_zz;  // second derivative
  double eta = 0.0;          // mean curvature of the profile
};

struct ProfilePoint {
  double value;
  double slope;
};

// Monotone factor entering the mean curvature; continuous across t = 1,
// where its value is (n-1)/n.  Strictly decreasing in t.
double curvature_factor(double t, const SlabConfig& cfg);

// Derivative of curvature_factor; equals -(n-1)/(2n) at t = 1, negative
// everywhere.
double curvature_factor_slope(double t, const SlabConfig& cfg);

// Shape function of the profile slope on x in [0, 1]; vanishes at both ends
// and reduces to sqrt((n-1)x(1-x)) at t = 1.  A Taylor bridge covers the
// cancellation-prone window around t = 1.
double slope_shape(double x, double t, const SlabConfig& cfg);

// Same, with both endpoint distances supplied explicitly (x + one_minus_x
// must represent a point of [0, 1]); this is the form singular quadrature
// feeds, where x itself may have rounded to 1.
double slope_shape_from_ends(double x, double one_minus_x, double t,
                             const SlabConfig& cfg);

// Height of the profile point with shape coordinate x above the bulge end:
// the integral of 1/slope_shape from x to 1.  Decreasing in x, zero at x = 1.
double height_from_radius(double x, double t, const SlabConfig& cfg,
                          const QuadratureSpec& quad);

// Full height of a half period: height_from_radius at x = 0.
double height_span(double t, const SlabConfig& cfg, const QuadratureSpec& quad);

// Inverse of height_from_radius on [0, height_span]; monotone decreasing.
// An optional hint seeds the bracketed Newton iteration (profile sweeps pass
// the previous node's solution).
double radius_from_height(double y, double t, const SlabConfig& cfg,
                          const QuadratureSpec& quad,
                          std::optional<double> hint = std::nullopt);

// Two-parameter profile u(z; r, t) with its z-slope.  z must lie in the
// parameter-dependent admissible interval [0, span(r) / span(t) * d] where
// span(s) = curvature_factor(s) * height_span(s).
ProfilePoint profile_point(double z, double r, double t, const SlabConfig& cfg,
                           const QuadratureSpec& quad);

// Diagonal (r = t) family sampled on the uniform (N+1)-node grid over [0, d].
// The second derivative comes from the constant-mean-curvature identity, not
// from differencing.
ProfileSamples profile_samples(const FamilyParam& param, const SlabConfig& cfg,
                               const QuadratureSpec& quad, int N);

// Parametric derivative of the diagonal profile with respect to t at fixed z:
// 4-point central differences at steps h and h/2, Richardson-extrapolated.
Estimate profile_t_derivative(double z, double t, const SlabConfig& cfg,
                              const QuadratureSpec& quad, double h);

struct GridDerivative {
  std::vector<double> values;
  double error = 0.0;  // max-norm extrapolation tail
};

// Same derivative on the whole uniform (N+1)-node grid at once.
GridDerivative profile_t_derivative_grid(double t, const SlabConfig& cfg,
                                         const QuadratureSpec& quad, int N,
                                         double h);

}  // namespace unduloid
