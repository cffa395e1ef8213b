#pragma once

#include "unduloid/family.hpp"
#include "unduloid/quadrature.hpp"
#include "unduloid/types.hpp"

namespace unduloid {

// Comparison area together with the domain-fit condition of the half-sphere
// (it only fits the slab while 2 vol / omega_{n+1} <= d^{n+1}).
struct HalfsphereArea {
  double value = 0.0;
  bool valid = false;
};

// Bundle of every scalar functional at one neck parameter, sharing one pass
// of the underlying quadratures.
struct GeometricScalars {
  double t = 0.0;
  double eta = 0.0;            // mean curvature
  double volume = 0.0;         // enclosed volume
  double sa_unduloid = 0.0;    // lateral area
  double sa_cylinder = 0.0;    // area of the equal-volume cylinder
  double sa_halfsphere = 0.0;  // area of the equal-volume half-sphere
  bool sa_halfsphere_valid = false;
  double xi = 0.0;             // scale-invariant combination eta^{n+1} volume
};

// Volume of the unit ball in R^m through the two-step recurrence
// w_m = 2 pi w_{m-2} / m (exact rational multiples of pi^k).
double unit_ball_volume(int m);

// Mean curvature of the profile at neck parameter t; symmetric under the
// reflection t -> 1/t.
double mean_curvature(double t, const SlabConfig& cfg, const QuadratureSpec& quad);

// Volume enclosed between the hypersurface and the slab walls; symmetric
// under t -> 1/t.
double enclosed_volume(double t, const SlabConfig& cfg, const QuadratureSpec& quad);

// Lateral area of the unduloid.
double unduloid_area(double t, const SlabConfig& cfg, const QuadratureSpec& quad);

// Area of the cylinder spanning the slab with the given enclosed volume.
double cylinder_area(double volume, const SlabConfig& cfg);

// Area of the half-sphere of the given volume, with its fit condition.
HalfsphereArea halfsphere_area(double volume, const SlabConfig& cfg);

// eta^{n+1} * volume; dimensionless and independent of the slab width.
double shape_invariant(double t, const SlabConfig& cfg, const QuadratureSpec& quad);

GeometricScalars geometric_scalars(double t, const SlabConfig& cfg,
                                   const QuadratureSpec& quad);

// Diagnostic: rebuilds the slope and curvature of the radius column by
// finite differences and returns max_z |H(v)(z) - eta|.  Deliberately does
// not trust the stored v_z / v_zz columns.
double mean_curvature_residual(const ProfileSamples& samples, const SlabConfig& cfg);

}  // namespace unduloid
