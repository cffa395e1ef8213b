#include "unduloid/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "parallel.hpp"
#include "unduloid/calculus.hpp"
#include "unduloid/family.hpp"
#include "unduloid/geometry.hpp"

namespace unduloid {

namespace {

// ===== AUDIT CACHE =====

struct AuditResult {
  bool ok = false;
  std::vector<CriticalPoint> criticals;  // ascending t0
};

std::string audit_key(const SlabConfig& cfg, const QuadratureSpec& quad) {
  char buf[192];
  std::snprintf(buf, sizeof buf, "%d|%.17g|%.17g|%d|%.17g|%.17g|%d", cfg.n,
                cfg.d, cfg.t_floor, static_cast<int>(quad.method), quad.rel_tol,
                quad.abs_tol, quad.max_level);
  return buf;
}

AuditResult run_audit(const SlabConfig& cfg, const QuadratureSpec& quad) {
  AuditResult result;
  const double t_lo = std::max(cfg.t_floor, 5e-3);
  result.criticals = find_critical_points(cfg, quad, t_lo, 1.0, 200);
  std::sort(result.criticals.begin(), result.criticals.end(),
            [](const CriticalPoint& a, const CriticalPoint& b) {
              return a.t0 < b.t0;
            });
  result.ok = true;
  for (const CriticalPoint& cp : result.criticals) {
    // The cylinder itself is always a slope zero; only interior critical
    // points are subject to the hypothesis.
    if (cp.t0 >= 1.0 - 1e-6) continue;
    if (cp.kind == CriticalKind::Degenerate || !(cp.eta1 < 0.0))
      result.ok = false;
  }
  return result;
}

// One audit per configuration and tolerance set.  The compute mutex keeps a
// cold-start scan from being duplicated by concurrent classify calls.
const AuditResult& hypothesis_audit(const SlabConfig& cfg,
                                    const QuadratureSpec& quad) {
  static std::map<std::string, AuditResult> cache;
  static std::mutex table_mu;
  static std::mutex compute_mu;
  const std::string key = audit_key(cfg, quad);
  {
    const std::lock_guard<std::mutex> lock(table_mu);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const std::lock_guard<std::mutex> compute_lock(compute_mu);
  {
    const std::lock_guard<std::mutex> lock(table_mu);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  AuditResult result = run_audit(cfg, quad);
  const std::lock_guard<std::mutex> lock(table_mu);
  return cache.emplace(key, std::move(result)).first->second;
}

void require_grid(const std::vector<double>& grid, const SlabConfig& cfg,
                  double upper, const char* range_name) {
  if (grid.empty()) throw std::invalid_argument("grid must not be empty");
  double prev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= cfg.t_floor) || !(grid[i] <= upper))
      throw std::invalid_argument(std::string("grid nodes must lie in ") +
                                  range_name);
    if (i > 0 && !(grid[i] > prev))
      throw std::invalid_argument("grid must be strictly increasing");
    prev = grid[i];
  }
}

}  // namespace

// ===== CLASSIFICATION =====

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Stable:
      return "stable";
    case Verdict::Unstable:
      return "unstable";
    case Verdict::Critical:
      return "critical";
    case Verdict::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

StabilityVerdict classify(double t0, const SlabConfig& cfg,
                          const QuadratureSpec& quad) {
  validate(cfg);
  if (!(t0 >= cfg.t_floor))
    throw std::invalid_argument(
        "classification parameter t0=" + std::to_string(t0) +
        " is below the configured floor t_floor=" + std::to_string(cfg.t_floor));
  if (t0 * cfg.t_floor > 1.0 + 1e-12)
    throw std::invalid_argument(
        "classification parameter t0=" + std::to_string(t0) +
        " exceeds the reciprocal of the configured floor 1/t_floor=" +
        std::to_string(1.0 / cfg.t_floor));
  if (t0 > 1.0) {
    StabilityVerdict out = classify(1.0 / t0, cfg, quad);
    out.t0 = t0;
    out.v_prime = -out.v_prime / (t0 * t0);
    out.v_prime_error = out.v_prime_error / (t0 * t0);
    return out;
  }
  const AuditResult& audit = hypothesis_audit(cfg, quad);
  const Estimate vp = enclosed_volume_slope(t0, cfg, quad);
  StabilityVerdict out;
  out.t0 = t0;
  out.v_prime = vp.value;
  out.v_prime_error = vp.error;
  out.hypothesis_ok = audit.ok;
  const double tol = 10.0 * vp.error;
  if (std::abs(vp.value) <= tol)
    out.verdict = Verdict::Critical;
  else if (!audit.ok)
    out.verdict = Verdict::Indeterminate;
  else
    out.verdict = vp.value > 0.0 ? Verdict::Stable : Verdict::Unstable;
  return out;
}

// ===== SCANS =====

ScanClassification scan_classification(const SlabConfig& cfg,
                                       const QuadratureSpec& quad,
                                       const std::vector<double>& grid) {
  validate(cfg);
  require_grid(grid, cfg, 1.0, "[t_floor, 1]");
  // Warm the audit cache before spawning workers.
  const AuditResult& audit = hypothesis_audit(cfg, quad);

  ScanClassification out;
  out.grid = grid;
  out.verdicts.resize(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) {
    out.verdicts[i] = classify(grid[i], cfg, quad);
  });

  ScanSummary& summary = out.summary;
  summary.hypothesis_ok = audit.ok;

  for (std::size_t i = 0; i < grid.size();) {
    if (out.verdicts[i].verdict != Verdict::Stable) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < grid.size() &&
           out.verdicts[j + 1].verdict == Verdict::Stable)
      ++j;
    summary.stable_intervals.push_back({grid[i], grid[j]});
    i = j + 1;
  }

  const double hull_lo = grid.front();
  const double hull_hi = grid.back();
  for (const CriticalPoint& cp : audit.criticals)
    if (cp.t0 >= hull_lo && cp.t0 <= hull_hi && cp.t0 < 1.0 - 1e-6)
      summary.critical_points.push_back(cp.t0);

  // Midpoint of every segment the critical points cut out of the hull;
  // slivers narrower than 1e-3 are skipped.
  std::vector<double> cuts;
  cuts.push_back(hull_lo);
  cuts.insert(cuts.end(), summary.critical_points.begin(),
              summary.critical_points.end());
  cuts.push_back(hull_hi);
  std::vector<double> mids;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s)
    if (cuts[s + 1] - cuts[s] >= 1e-3)
      mids.push_back(0.5 * (cuts[s] + cuts[s + 1]));

  std::vector<SpectrumResult> spectra(mids.size());
  detail::parallel_for(mids.size(), [&](std::size_t s) {
    const ProfileSamples samples =
        profile_samples(FamilyParam{mids[s], std::nullopt}, cfg, quad, 512);
    spectra[s] = eigen_spectrum(assemble_operator(samples, cfg), 4);
  });

  const double pi = std::numbers::pi;
  const double neg_threshold = -1e-4 * pi * pi / (cfg.d * cfg.d);
  summary.midpoints.resize(mids.size());
  for (std::size_t s = 0; s < mids.size(); ++s) {
    int negatives = 0;
    for (const double lambda : spectra[s].eigenvalues)
      if (lambda < neg_threshold) ++negatives;
    summary.midpoints[s] = MidpointCheck{mids[s], negatives};
    auto it = std::lower_bound(out.grid.begin(), out.grid.end(), mids[s]);
    std::size_t idx = static_cast<std::size_t>(it - out.grid.begin());
    if (idx == out.grid.size() ||
        (idx > 0 && mids[s] - out.grid[idx - 1] < out.grid[idx] - mids[s]))
      --idx;
    out.verdicts[idx].evidence = std::move(spectra[s]);
  }
  return out;
}

ConjectureReport conjecture_scan(const SlabConfig& cfg,
                                 const QuadratureSpec& quad,
                                 const std::vector<double>& grid) {
  validate(cfg);
  require_grid(grid, cfg, 1.0, "[t_floor, 1)");
  if (grid.back() >= 1.0)
    throw std::invalid_argument(
        "conjecture grid must stay strictly below the cylinder t=1, whose "
        "slope vanishes by symmetry");
  ConjectureReport report;
  report.nodes.resize(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) {
    const Estimate slope = shape_invariant_slope(grid[i], cfg, quad);
    report.nodes[i] = ConjectureNode{grid[i], slope.value, slope.error};
  });
  for (const ConjectureNode& node : report.nodes)
    if (node.xi_slope - 10.0 * node.error > 0.0)
      report.violations.push_back(node.t);
  report.no_counterexample = report.violations.empty();
  return report;
}

// ===== FIGURES =====

FigureData figure_data(const SlabConfig& cfg, const QuadratureSpec& quad,
                       const std::vector<double>& grid) {
  validate(cfg);
  require_grid(grid, cfg, 1.0 - 1e-3, "[t_floor, 1 - 1e-3]");
  FigureData fig;
  fig.curves.columns = {"t", "volume_slope_scaled", "volume_curvature",
                        "shape_invariant_slope"};
  fig.areas.columns = {"t", "volume", "unduloid_area", "cylinder_area",
                       "halfsphere_area", "cylinder_gap", "halfsphere_gap",
                       "halfsphere_valid"};
  fig.curves.rows.resize(grid.size());
  fig.areas.rows.resize(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) {
    const double t = grid[i];
    const Estimate v1 = enclosed_volume_slope(t, cfg, quad);
    const Estimate v2 = enclosed_volume_curvature(t, cfg, quad);
    const Estimate x1 = shape_invariant_slope(t, cfg, quad);
    fig.curves.rows[i] = {t, v1.value / (1.0 - t), v2.value, x1.value};
    const GeometricScalars g = geometric_scalars(t, cfg, quad);
    fig.areas.rows[i] = {t,
                         g.volume,
                         g.sa_unduloid,
                         g.sa_cylinder,
                         g.sa_halfsphere,
                         g.sa_cylinder - g.sa_unduloid,
                         g.sa_halfsphere - g.sa_unduloid,
                         g.sa_halfsphere_valid ? 1.0 : 0.0};
  });
  for (std::size_t col = 1; col <= 3; ++col) {
    double peak = 0.0;
    for (const std::vector<double>& row : fig.curves.rows)
      peak = std::max(peak, std::abs(row[col]));
    if (peak > 0.0)
      for (std::vector<double>& row : fig.curves.rows) row[col] /= peak;
  }
  return fig;
}

}  // namespace unduloid
