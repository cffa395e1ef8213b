#pragma once

#include <optional>
#include <string>
#include <vector>

#include "unduloid/quadrature.hpp"
#include "unduloid/spectrum.hpp"
#include "unduloid/types.hpp"

namespace unduloid {

enum class Verdict { Stable, Unstable, Critical, Indeterminate };

// Lowercase label for serialization.
const char* verdict_name(Verdict v);

// Slope-sign classification of one neck parameter.  The verdict follows the
// sign of the volume slope only while the hypothesis audit holds: every
// interior critical point of the volume must have a resolved second
// derivative and a negative mean-curvature slope.  A slope within ten times
// its own error estimate of zero surfaces as Critical rather than being
// forced to a side; a failed audit downgrades signed verdicts to
// Indeterminate.
struct StabilityVerdict {
  double t0 = 1.0;
  Verdict verdict = Verdict::Indeterminate;
  double v_prime = 0.0;        // volume slope at t0
  double v_prime_error = 0.0;  // propagated derivative error estimate
  bool hypothesis_ok = false;
  std::optional<SpectrumResult> evidence;  // attached by scans on demand
};

// Classifies one neck parameter.  For t0 > 1 the reflected parameter 1/t0
// is classified instead and the slope mapped back through the reflection;
// the verdict label is unchanged because both parameters describe the same
// surface (which flips the slope-sign rule on that side of 1).  The
// hypothesis audit runs once per configuration and tolerance set, then is
// cached.
StabilityVerdict classify(double t0, const SlabConfig& cfg,
                          const QuadratureSpec& quad);

// Maximal run of consecutive Stable grid nodes.
struct StableInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// Independent spectral corroboration at one segment midpoint: the number of
// eigenvalues below -1e-4 * pi^2 / d^2.
struct MidpointCheck {
  double t = 0.0;
  int negative_count = 0;
};

struct ScanSummary {
  bool hypothesis_ok = false;
  std::vector<StableInterval> stable_intervals;
  std::vector<double> critical_points;  // audited slope zeros inside the
                                        // grid hull, ascending
  std::vector<MidpointCheck> midpoints;
};

struct ScanClassification {
  std::vector<double> grid;
  std::vector<StabilityVerdict> verdicts;  // one per grid node
  ScanSummary summary;
};

// Classifies every node of a strictly increasing grid in [t_floor, 1].
// Nodes run in parallel (UNDULOID_THREADS caps the workers); the summary
// reduction is sequential.  Spectra are computed at the midpoint of each
// segment cut out of the grid hull by the critical points and attached as
// evidence to the nearest grid node.
ScanClassification scan_classification(const SlabConfig& cfg,
                                       const QuadratureSpec& quad,
                                       const std::vector<double>& grid);

// One node of the monotonicity scan of the shape invariant.
struct ConjectureNode {
  double t = 0.0;
  double xi_slope = 0.0;
  double error = 0.0;  // propagated derivative error estimate
};

struct ConjectureReport {
  std::vector<ConjectureNode> nodes;
  std::vector<double> violations;  // nodes whose slope clears zero upward
  bool no_counterexample = true;
};

// Scans the slope of the shape invariant over a strictly increasing grid in
// [t_floor, 1).  A node counts as a violation only when its slope exceeds
// zero by ten times its own error estimate.
ConjectureReport conjecture_scan(const SlabConfig& cfg,
                                 const QuadratureSpec& quad,
                                 const std::vector<double>& grid);

// Column-labelled numeric table, one row per grid node.
struct DataTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct FigureData {
  DataTable curves;  // t, volume_slope_scaled, volume_curvature,
                     // shape_invariant_slope
  DataTable areas;   // t, volume, unduloid_area, cylinder_area,
                     // halfsphere_area, cylinder_gap, halfsphere_gap,
                     // halfsphere_valid
};

// Plot-ready tables over a strictly increasing grid in [t_floor, 1 - 1e-3].
// The slope column is volume_slope / (1 - t); the three curve columns are
// rescaled so the maximum of |column| over the grid is exactly 1.  The gap
// columns are the comparison area minus the unduloid area.
FigureData figure_data(const SlabConfig& cfg, const QuadratureSpec& quad,
                       const std::vector<double>& grid);

}  // namespace unduloid
