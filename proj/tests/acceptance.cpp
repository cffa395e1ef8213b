// Acceptance gate: each criterion prints one PASS/FAIL line with the worst
// observed margin.  Run everything, or a single check via --criterion k.
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "unduloid/calculus.hpp"
#include "unduloid/family.hpp"
#include "unduloid/geometry.hpp"
#include "unduloid/quadrature.hpp"
#include "unduloid/report.hpp"
#include "unduloid/spectrum.hpp"

using namespace unduloid;

namespace {

constexpr double kPi = std::numbers::pi;

std::string text(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

SlabConfig make_cfg(int n) {
  SlabConfig cfg;
  cfg.n = n;
  return cfg;
}

DiscretizedOperator make_op(double t, const SlabConfig& cfg, int N,
                            const QuadratureSpec& quad) {
  FamilyParam param;
  param.t = t;
  return assemble_operator(profile_samples(param, cfg, quad, N), cfg);
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> nodes(count);
  for (int i = 0; i < count; ++i)
    nodes[i] = a + (b - a) * (static_cast<double>(i) / (count - 1));
  nodes.back() = b;
  return nodes;
}

std::vector<double> midpoint_grid(double a, double b, int count) {
  std::vector<double> nodes(count);
  for (int i = 0; i < count; ++i) nodes[i] = a + (i + 0.5) * (b - a) / count;
  return nodes;
}

// 1. Closed-form identities of the building blocks.
bool crit1(std::string& detail) {
  const QuadratureSpec quad;
  double worst_p = 0.0, worst_zeta = 0.0, worst_q = 0.0;
  for (const int n : {2, 3, 8, 11}) {
    const SlabConfig cfg = make_cfg(n);
    const double ref_p = kPi / std::sqrt(n - 1.0);
    worst_p = std::max(
        worst_p, std::abs(height_span(1.0, cfg, quad) - ref_p) / ref_p);
    for (int i = 1; i <= 9; ++i) {
      const double x = i / 10.0;
      const double ref = 2.0 / std::sqrt(n - 1.0) *
                         std::asin(std::sqrt(1.0 - x));
      worst_zeta = std::max(
          worst_zeta,
          std::abs(height_from_radius(x, 1.0, cfg, quad) - ref) / ref);
    }
    worst_q = std::max(
        worst_q, std::abs(curvature_factor(1.0, cfg) - (n - 1.0) / n));
    worst_q = std::max(worst_q, std::abs(curvature_factor_slope(1.0, cfg) +
                                         (n - 1.0) / (2.0 * n)));
  }
  detail = text("rel err P(1) %.2e (<=1e-10), zeta(.;1) %.2e (<=1e-9), "
                "Q(1)/Q'(1) %.2e (round-off)",
                worst_p, worst_zeta, worst_q);
  return worst_p <= 1e-10 && worst_zeta <= 1e-9 && worst_q <= 1e-14;
}

// 2. Reflection symmetry of the functionals and the flat slopes at t = 1.
bool crit2(std::string& detail) {
  const QuadratureSpec quad;
  std::mt19937 rng(20240817);
  std::uniform_real_distribution<double> dist(0.05, 0.95);
  std::vector<double> draws(10);
  for (double& t : draws) t = dist(rng);

  double worst = 0.0;
  for (const int n : {2, 8, 11}) {
    const SlabConfig cfg = make_cfg(n);
    for (const double t : draws) {
      const double mirrored = 1.0 / t;
      const double v = enclosed_volume(t, cfg, quad);
      worst = std::max(worst,
                       std::abs(enclosed_volume(mirrored, cfg, quad) - v) /
                           std::abs(v));
      const double eta = mean_curvature(t, cfg, quad);
      worst = std::max(worst,
                       std::abs(mean_curvature(mirrored, cfg, quad) - eta) /
                           std::abs(eta));
      const double area = unduloid_area(t, cfg, quad);
      worst = std::max(worst,
                       std::abs(unduloid_area(mirrored, cfg, quad) - area) /
                           std::abs(area));
      const double p = height_span(t, cfg, quad);
      worst = std::max(worst,
                       std::abs(height_span(mirrored, cfg, quad) - p / t) /
                           (p / t));
    }
  }
  const SlabConfig cfg8 = make_cfg(8);
  const double v_slope = std::abs(enclosed_volume_slope(1.0, cfg8, quad).value);
  const double eta_slope =
      std::abs(mean_curvature_slope(1.0, cfg8, quad).value);
  detail = text("worst symmetry rel err %.2e (<=1e-8), |V'(1)|=%.2e, "
                "|eta'(1)|=%.2e (<=1e-6)",
                worst, v_slope, eta_slope);
  return worst <= 1e-8 && v_slope <= 1e-6 && eta_slope <= 1e-6;
}

// 3. Mean-curvature residual of the sampled profiles.
bool crit3(std::string& detail) {
  const QuadratureSpec quad;
  double worst = 0.0;
  for (const int n : {3, 8}) {
    const SlabConfig cfg = make_cfg(n);
    for (const double t : {0.3, 0.5, 0.7, 0.9}) {
      FamilyParam param;
      param.t = t;
      const ProfileSamples samples = profile_samples(param, cfg, quad, 512);
      worst = std::max(
          worst, mean_curvature_residual(samples, cfg) / samples.eta);
    }
  }
  detail = text("max residual / eta = %.2e (<=1e-6)", worst);
  return worst <= 1e-6;
}

// 4. Cylinder spectrum against the constant-coefficient closed form.
bool crit4(std::string& detail) {
  const QuadratureSpec quad;
  const SlabConfig cfg = make_cfg(8);
  const double refs[3] = {0.0, 3.0 * kPi * kPi, 8.0 * kPi * kPi};
  double errs[2][3];
  bool within = true;
  const int sizes[2] = {1024, 2048};
  for (int s = 0; s < 2; ++s) {
    const int N = sizes[s];
    const SpectrumResult spec = eigen_spectrum(make_op(1.0, cfg, N, quad), 3);
    for (int k = 0; k < 3; ++k) {
      errs[s][k] = std::abs(spec.eigenvalues[k] - refs[k]);
      if (errs[s][k] > 800.0 / (static_cast<double>(N) * N)) within = false;
    }
  }
  double min_order = 1e300;
  for (int k = 0; k < 3; ++k)
    min_order = std::min(min_order, std::log2(errs[0][k] / errs[1][k]));
  detail = text("errors at N=2048: %.1e/%.1e/%.1e (<=800/N^2=1.9e-4), "
                "fitted order %.2f (>=1.8)",
                errs[1][0], errs[1][1], errs[1][2], min_order);
  return within && min_order >= 1.8;
}

// 5. One-dimensional kernel at the volume-critical parameters.
bool crit5(std::string& detail) {
  const QuadratureSpec quad;
  const SlabConfig cfg = make_cfg(8);
  const std::vector<CriticalPoint> criticals =
      find_critical_points(cfg, quad, 5e-3, 1.0, 200);
  if (criticals.size() != 2) {
    detail = text("expected 2 interior critical points, found %zu",
                  criticals.size());
    return false;
  }
  const int N = 2048;
  double worst_lambda = 0.0, worst_dist = 0.0;
  for (const CriticalPoint& cp : criticals) {
    const DiscretizedOperator op = make_op(cp.t0, cfg, N, quad);
    const SpectrumResult spec = eigen_spectrum(op, 4);
    int best = 0;
    for (int i = 1; i < 4; ++i)
      if (std::abs(spec.eigenvalues[i]) < std::abs(spec.eigenvalues[best]))
        best = i;
    worst_lambda = std::max(worst_lambda, std::abs(spec.eigenvalues[best]));

    std::vector<double> u =
        profile_t_derivative_grid(cp.t0, cfg, quad, N, 1e-3).values;
    const double nrm = std::sqrt(weighted_inner(op, u, u));
    for (double& x : u) x /= nrm;
    const std::vector<double>& w = spec.eigenfunctions[best];
    const double overlap = weighted_inner(op, w, u);
    std::vector<double> diff(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
      diff[i] = w[i] - (overlap >= 0.0 ? u[i] : -u[i]);
    worst_dist =
        std::max(worst_dist, std::sqrt(weighted_inner(op, diff, diff)));
  }
  detail = text("max |lambda_0| %.2e (<=%.2e), max M-distance to v_t %.2e "
                "(<=1e-2)",
                worst_lambda, 1e-3 * kPi * kPi, worst_dist);
  return worst_lambda <= 1e-3 * kPi * kPi && worst_dist <= 1e-2;
}

// 6. Exchange-of-stability slope at the volume minimum.
bool crit6(std::string& detail) {
  const QuadratureSpec quad;
  const SlabConfig cfg = make_cfg(8);
  const std::vector<CriticalPoint> criticals =
      find_critical_points(cfg, quad, 5e-3, 1.0, 200);
  double t0 = 0.0;
  for (const CriticalPoint& cp : criticals)
    if (cp.kind == CriticalKind::Minimum) t0 = cp.t0;
  if (t0 == 0.0) {
    detail = "no volume minimum found";
    return false;
  }
  const SlopeComparison cmp = eigenvalue_slope_at_critical(t0, cfg, quad, 1024);
  const double rel = std::abs(cmp.formula_value - cmp.continuation_value) /
                     std::abs(cmp.formula_value);
  detail = text("formula %.6f vs continuation %.6f: rel %.2e (<=5e-2), "
                "signs %c/%c (+/+)",
                cmp.formula_value, cmp.continuation_value, rel,
                cmp.formula_value > 0 ? '+' : '-',
                cmp.continuation_value > 0 ? '+' : '-');
  return rel <= 5e-2 && cmp.formula_value > 0.0 && cmp.continuation_value > 0.0;
}

// 7. Stable window, hypothesis audit, and invariant monotonicity (n = 8).
bool crit7(std::string& detail) {
  const QuadratureSpec quad;
  const SlabConfig cfg = make_cfg(8);
  const std::vector<double> grid = midpoint_grid(1e-3, 1.0 - 1e-3, 200);
  const ScanClassification scan = scan_classification(cfg, quad, grid);

  const std::vector<CriticalPoint> criticals =
      find_critical_points(cfg, quad, 5e-3, 1.0, 200);
  bool audit = !criticals.empty();
  for (const CriticalPoint& cp : criticals) {
    if (cp.t0 >= 1.0 - 1e-6) continue;
    if (cp.kind == CriticalKind::Degenerate || !(cp.eta1 < 0.0)) audit = false;
  }

  const ConjectureReport report = conjecture_scan(cfg, quad, grid);
  int positive_nodes = 0;
  for (const ConjectureNode& node : report.nodes)
    if (!(node.xi_slope < 0.0)) ++positive_nodes;

  detail = text("stable intervals %zu (>=1), criticals audited %s, "
                "xi' >= 0 at %d/200 nodes (need 0)",
                scan.summary.stable_intervals.size(), audit ? "ok" : "FAILED",
                positive_nodes);
  return !scan.summary.stable_intervals.empty() && audit &&
         positive_nodes == 0;
}

// 8. Known stability boundaries near the cylinder and in low dimension.
bool crit8(std::string& detail) {
  const QuadratureSpec quad;
  const SlabConfig cfg8 = make_cfg(8);
  const SlabConfig cfg11 = make_cfg(11);

  const StabilityVerdict v8 = classify(0.99, cfg8, quad);
  const StabilityVerdict v11 = classify(0.99, cfg11, quad);

  auto negatives = [&](const SlabConfig& cfg) {
    const SpectrumResult spec = eigen_spectrum(make_op(0.99, cfg, 1024, quad), 4);
    int count = 0;
    for (const double lambda : spec.eigenvalues)
      if (lambda < 0.0) ++count;
    return count;
  };
  const int neg8 = negatives(cfg8);
  const int neg11 = negatives(cfg11);

  const SlabConfig cfg3 = make_cfg(3);
  const ScanClassification scan =
      scan_classification(cfg3, quad, midpoint_grid(1e-3, 1.0 - 1e-3, 200));
  int stable_nodes = 0;
  for (const StabilityVerdict& v : scan.verdicts)
    if (v.verdict == Verdict::Stable) ++stable_nodes;

  detail = text("n=8 t=0.99: %s with %d negatives (unstable/1); n=11: %s "
                "with %d (stable/0); n=3 stable nodes %d (0)",
                verdict_name(v8.verdict), neg8, verdict_name(v11.verdict),
                neg11, stable_nodes);
  return v8.verdict == Verdict::Unstable && neg8 == 1 &&
         v11.verdict == Verdict::Stable && neg11 == 0 && stable_nodes == 0;
}

// 9. The unduloid loses the area comparison at every sampled parameter.
bool crit9(std::string& detail) {
  const QuadratureSpec quad;
  const SlabConfig cfg = make_cfg(8);
  double worst_gap = -1e300;
  int invalid = 0;
  for (const double t : linspace(0.05, 0.95, 50)) {
    const GeometricScalars g = geometric_scalars(t, cfg, quad);
    worst_gap = std::max(worst_gap,
                         std::min(g.sa_cylinder - g.sa_unduloid,
                                  g.sa_halfsphere - g.sa_unduloid));
    if (!g.sa_halfsphere_valid) ++invalid;
  }
  detail = text("max over nodes of min(SA_c, SA_s) - SA_u = %.3e (<0), "
                "half-sphere invalid at %d/50 nodes (need 0)",
                worst_gap, invalid);
  return worst_gap < 0.0 && invalid == 0;
}

// 10. The two quadrature schemes agree on every functional.
bool crit10(std::string& detail) {
  QuadratureSpec de;
  de.method = QuadMethod::DoubleExponential;
  QuadratureSpec sg;
  sg.method = QuadMethod::SubstitutedGauss;
  const SlabConfig cfg = make_cfg(8);
  double worst = 0.0;
  for (const double t : linspace(0.05, 0.95, 20)) {
    const GeometricScalars a = geometric_scalars(t, cfg, de);
    const GeometricScalars b = geometric_scalars(t, cfg, sg);
    const double pairs[6][2] = {{a.eta, b.eta},
                                {a.volume, b.volume},
                                {a.sa_unduloid, b.sa_unduloid},
                                {a.sa_cylinder, b.sa_cylinder},
                                {a.sa_halfsphere, b.sa_halfsphere},
                                {a.xi, b.xi}};
    for (const auto& pair : pairs)
      worst = std::max(worst,
                       std::abs(pair[0] - pair[1]) / std::abs(pair[0]));
  }
  detail = text("worst cross-method rel deviation %.2e (<=1e-8)", worst);
  return worst <= 1e-8;
}

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  for (int i = 1; i < argc; ++i)
    if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc)
      selected = std::atoi(argv[++i]);

  bool (*const criteria[10])(std::string&) = {crit1, crit2, crit3, crit4,
                                              crit5, crit6, crit7, crit8,
                                              crit9, crit10};
  bool all_ok = true;
  for (int k = 1; k <= 10; ++k) {
    if (selected != 0 && k != selected) continue;
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[k - 1](detail);
    } catch (const std::exception& e) {
      detail = text("exception: %s", e.what());
    }
    std::printf("criterion %d: %s - %s\n", k, ok ? "PASS" : "FAIL",
                detail.c_str());
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
