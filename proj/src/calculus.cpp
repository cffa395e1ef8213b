#include "unduloid/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "unduloid/geometry.hpp"

namespace unduloid {

// ===== DIFFERENTIATION =====

Estimate derivative(const std::function<double(double)>& f, double t, int order,
                    double h0, double noise_floor) {
  if (order != 1 && order != 2)
    throw std::invalid_argument("derivative: order must be 1 or 2");
  if (!(h0 > 0.0) || !std::isfinite(h0))
    throw std::invalid_argument("derivative: step must be positive");
  if (!(h0 <= 1e-2 * std::abs(t)))
    throw std::invalid_argument("derivative: step exceeds 1e-2 of the base point");
  if (!(noise_floor >= 0.0) || !std::isfinite(noise_floor))
    throw std::invalid_argument("derivative: noise floor must be non-negative");
  const double eps_mach = std::numeric_limits<double>::epsilon();
  if (h0 < 1e3 * eps_mach * std::abs(t))
    throw StepError("derivative: step underflows the spacing at the base point");
  if (noise_floor > h0 * h0 * h0)
    throw StepError("derivative: declared noise floor exceeds the step-cubed budget");

  const double f0 = (order == 2) ? f(t) : 0.0;
  double scale = (order == 2) ? std::abs(f0) : 0.0;
  const auto stencil = [&](double h) {
    const double hi = f(t + h);
    const double lo = f(t - h);
    scale = std::max({scale, std::abs(hi), std::abs(lo)});
    return (order == 1) ? (hi - lo) / (2.0 * h) : (hi - 2.0 * f0 + lo) / (h * h);
  };
  const double d1 = stencil(4.0 * h0);
  const double d2 = stencil(2.0 * h0);
  const double d3 = stencil(h0);
  const double r2 = (4.0 * d3 - d2) / 3.0;
  const double r3 = (16.0 * r2 - (4.0 * d2 - d1) / 3.0) / 15.0;

  const double amp = std::max(noise_floor, eps_mach) * std::max(scale, 1e-300);
  const double predicted = (order == 1) ? amp / h0 : 4.0 * amp / (h0 * h0);
  // The raw stencil contracts ~4x per halving on smooth data; a stall that
  // sits far above the declared evaluation noise means the signal is rough.
  if (std::abs(d3 - d2) > 0.9 * std::abs(d2 - d1) &&
      std::abs(d3 - d2) > 1e3 * predicted)
    throw NoisySignalError(
        "derivative: differences stopped contracting above the declared noise");
  return {r3, std::max(std::abs(r3 - r2), predicted)};
}

// ===== ROOT FINDING =====

double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol) {
  if (!(xtol > 0.0)) throw std::invalid_argument("brent_root: xtol must be positive");
  double fa = f(a);
  double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw NumericsError("brent_root: endpoint value not finite");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw RootBracketError("brent_root: endpoints do not straddle a sign change");

  double c = a, fc = fa;
  double d = b - a, e = d;
  const double eps_mach = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 200; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * eps_mach * std::abs(b) + 0.5 * xtol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      // inverse quadratic interpolation, secant when only two points differ
      const double s = fb / fa;
      double p, q;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw NumericsError("brent_root: iteration limit reached");
}

// ===== FUNCTIONAL DERIVATIVES =====

namespace {

struct CoupledStep {
  double h0;
  QuadratureSpec quad;
};

// Pick the widest step whose 4*h0 stencil stays inside the admissible neck
// range, then tighten the quadrature tolerance to respect the step-cubed
// noise budget of `derivative`.
CoupledStep coupled_step(double t, const SlabConfig& cfg, const QuadratureSpec& quad) {
  validate(cfg);
  validate(quad);
  double h0 = std::min(1e-2 * t, (t - cfg.t_floor) / 4.1);
  h0 = std::min(h0, (1.0 / cfg.t_floor - t) / 4.1);
  if (!(h0 > 0.0))
    throw StepError("coupled_step: base point outside the admissible neck range");
  CoupledStep out{h0, quad};
  out.quad.rel_tol = std::min(quad.rel_tol, 0.999 * h0 * h0 * h0);
  if (out.quad.rel_tol < 1e-14)
    throw StepError("coupled_step: too close to the neck floor for a stable step");
  return out;
}

}  // namespace

Estimate enclosed_volume_slope(double t, const SlabConfig& cfg, const QuadratureSpec& quad) {
  const CoupledStep cs = coupled_step(t, cfg, quad);
  const auto f = [&](double s) { return enclosed_volume(s, cfg, cs.quad); };
  return derivative(f, t, 1, cs.h0, cs.quad.rel_tol);
}

Estimate enclosed_volume_curvature(double t, const SlabConfig& cfg, const QuadratureSpec& quad) {
  const CoupledStep cs = coupled_step(t, cfg, quad);
  const auto f = [&](double s) { return enclosed_volume(s, cfg, cs.quad); };
  return derivative(f, t, 2, cs.h0, cs.quad.rel_tol);
}

Estimate mean_curvature_slope(double t, const SlabConfig& cfg, const QuadratureSpec& quad) {
  const CoupledStep cs = coupled_step(t, cfg, quad);
  const auto f = [&](double s) { return mean_curvature(s, cfg, cs.quad); };
  return derivative(f, t, 1, cs.h0, cs.quad.rel_tol);
}

Estimate shape_invariant_slope(double t, const SlabConfig& cfg, const QuadratureSpec& quad) {
  const CoupledStep cs = coupled_step(t, cfg, quad);
  const auto f = [&](double s) { return shape_invariant(s, cfg, cs.quad); };
  return derivative(f, t, 1, cs.h0, cs.quad.rel_tol);
}

// ===== CRITICAL POINT SCAN =====

std::vector<CriticalPoint> find_critical_points(const SlabConfig& cfg,
                                                const QuadratureSpec& quad,
                                                double t_lo, double t_hi, int steps) {
  validate(cfg);
  validate(quad);
  if (!(t_lo >= cfg.t_floor))
    throw std::invalid_argument("find_critical_points: t_lo below the neck floor");
  if (!(t_lo < t_hi) || !(t_hi <= 1.0))
    throw std::invalid_argument("find_critical_points: require t_lo < t_hi <= 1");
  if (steps < 50)
    throw std::invalid_argument("find_critical_points: need at least 50 scan steps");

  struct Node {
    double t = 0.0;
    double slope = 0.0;
    double err = 0.0;
  };
  // Keep only nodes whose slope is resolved above its own error bar: nodes
  // where V' ~ 0 at the working precision (the reflection point, the near-
  // floor fringe) must not seed spurious brackets.
  std::vector<Node> informative;
  for (int j = 0; j <= steps; ++j) {
    const double tj = t_lo + (t_hi - t_lo) * j / steps;
    try {
      const Estimate e = enclosed_volume_slope(tj, cfg, quad);
      if (std::abs(e.value) > 3.0 * e.error) informative.push_back({tj, e.value, e.error});
    } catch (const StepError&) {
      // node too close to the floor for a coupled step; skip it
    }
  }

  double ref_curv = 0.0;
  for (size_t i = 1; i < informative.size(); ++i)
    ref_curv = std::max(ref_curv,
                        std::abs(informative[i].slope - informative[i - 1].slope) /
                            (informative[i].t - informative[i - 1].t));

  std::vector<CriticalPoint> out;
  const auto slope_at = [&](double s) { return enclosed_volume_slope(s, cfg, quad).value; };
  for (size_t i = 1; i < informative.size(); ++i) {
    const Node& lo = informative[i - 1];
    const Node& hi = informative[i];
    if ((lo.slope > 0.0) == (hi.slope > 0.0)) continue;
    CriticalPoint cp;
    cp.t0 = brent_root(slope_at, lo.t, hi.t, 1e-8);
    cp.v2 = enclosed_volume_curvature(cp.t0, cfg, quad).value;
    cp.eta1 = mean_curvature_slope(cp.t0, cfg, quad).value;
    if (std::abs(cp.v2) < 1e-4 * ref_curv)
      cp.kind = CriticalKind::Degenerate;
    else
      cp.kind = (cp.v2 > 0.0) ? CriticalKind::Minimum : CriticalKind::Maximum;
    out.push_back(cp);
  }
  std::sort(out.begin(), out.end(),
            [](const CriticalPoint& x, const CriticalPoint& y) { return x.t0 > y.t0; });
  return out;
}

}  // namespace unduloid
