#include "unduloid/family.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace unduloid {

void validate(const SlabConfig& cfg) {
  if (cfg.n < 2 || cfg.n > 64)
    throw std::invalid_argument("dimension parameter n must lie in [2, 64]");
  if (!(cfg.d > 0.0)) throw std::invalid_argument("slab width d must be positive");
  if (!(cfg.t_floor >= 1e-4) || cfg.t_floor > 0.1)
    throw std::invalid_argument("neck-parameter floor must lie in [1e-4, 0.1]");
}

namespace {

constexpr double kPi = std::numbers::pi;

// Width of the Taylor bridge around t = 1 inside which the closed form of
// slope_shape loses too many digits to cancellation.
constexpr double kBridgeWindow = 1e-4;

void require_positive_t(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("family parameter t must be positive");
}

void require_admissible_t(double t, const SlabConfig& cfg) {
  if (t < cfg.t_floor)
    throw std::invalid_argument(
        "family parameter t=" + std::to_string(t) +
        " is below the configured floor t_floor=" + std::to_string(cfg.t_floor));
  require_positive_t(t);  // still rejects NaN, which no inequality catches
  if (t * cfg.t_floor > 1.0 + 1e-12)
    throw std::invalid_argument(
        "family parameter t=" + std::to_string(t) +
        " exceeds the reciprocal of the configured floor 1/t_floor=" +
        std::to_string(1.0 / cfg.t_floor));
}

// 1 - Q(t) evaluated without cancellation: t^{n-1}(1-t)/(1-t^n).
double one_minus_curvature_factor(double t, int n) {
  const double lt = std::log(t);
  return std::exp((n - 1) * lt) * std::expm1(lt) / std::expm1(n * lt);
}

// Core of slope_shape; x and delta are the distances to 0 and 1 and must be
// individually accurate (their double-precision sum may round).
double r_eval(double x, double delta, double t, const SlabConfig& cfg) {
  const int n = cfg.n;
  if (x == 0.0 || delta == 0.0) return 0.0;
  const double eps = 1.0 - t;
  if (eps == 0.0) return std::sqrt((n - 1) * x * delta);

  if (std::abs(eps) < kBridgeWindow) {
    // Second-order expansion in (1-t) of the squared shape around the t = 1
    // branch; relative error ~1e-12 at the window edge, cross-validated
    // against the closed form in the tests.
    const double c3 = (n + 1) * x / 3.0 + (5.0 - n) / 6.0;
    const double c4 = (static_cast<double>(n) * n - 6.0 * n + 11.0) * x * x / 12.0 +
                      (12.0 * n - static_cast<double>(n) * n - 5.0) * x / 12.0 +
                      (3.0 - n) / 4.0;
    const double bracket = 1.0 + eps * (c3 + eps * c4);
    return std::sqrt(std::max((n - 1) * x * delta * bracket, 0.0));
  }

  // Closed form: with a = (1-(1-t)x)^{n-1} and b the mean-curvature
  // denominator, the squared shape is (a-b)(a+b)/b^2 / (1-t)^2.  Near the
  // endpoint anchors a-b is expressed through expm1 so the leading terms
  // cancel exactly instead of catastrophically; far from both anchors the
  // ratio a/b is O(1) away from 1 and direct evaluation is safe (and does
  // not overflow, unlike the anchored intermediates at extreme t).
  const double q = curvature_factor(t, cfg);
  const double lt = std::log(t);
  // Log-offset of 1-(1-t)x from the nearest exact anchor (x=0 or x=1).
  const double g = (x <= 0.5) ? std::log1p(-eps * x) : std::log1p(eps * delta / t);
  double s2m1;
  if (std::abs(n * g) > 20.0) {
    const double lw = (x <= 0.5) ? g : lt + g;  // = log(1-(1-t)x)
    const double a = std::exp((n - 1) * lw);
    const double b = one_minus_curvature_factor(t, n) + q * std::exp(n * lw);
    const double ratio = a / b;
    s2m1 = (ratio - 1.0) * (ratio + 1.0);
  } else if (x <= 0.5) {
    const double em1 = std::expm1((n - 1) * g);
    const double em = std::expm1(n * g);
    const double amb = em1 - q * em;
    const double apb = 2.0 + em1 + q * em;
    const double b = 1.0 + q * em;
    s2m1 = amb * apb / (b * b);
  } else {
    // Anchor at x = 1: 1-(1-t)x = t(1 + (1-t)delta/t), and the delta-free
    // part of a-b vanishes identically, leaving only expm1 terms.  Both
    // sides are scaled by t^{-(n-1)}, which cancels in the final ratio;
    // without the scaling 1-q rounds to zero once t^{n-1} drops below the
    // machine epsilon and the intermediates can drift out of double range.
    const double sm1 = std::expm1((n - 1) * g);
    const double sm = std::expm1(n * g);
    const double w1 = std::expm1(lt) / std::expm1(n * lt);  // (1-t)/(1-t^n)
    const double qt = q * t;
    const double amb = sm1 - qt * sm;
    const double b = w1 + qt * (1.0 + sm);
    const double apb = 1.0 + sm1 + b;
    s2m1 = amb * apb / (b * b);
  }
  return std::sqrt(std::max(s2m1, 0.0)) / std::abs(eps);
}

// Reciprocal-shape integrand on [a, b] <= [0, 1] with endpoint-exact
// distances threaded through when an interval end touches 0 or 1.
Integrand shape_recip_integrand(double a, double b, double t,
                                const SlabConfig& cfg) {
  const bool lo_is_zero = (a == 0.0);
  const bool hi_is_one = (b == 1.0);
  return [=, &cfg](double x, double dist_a, double dist_b) {
    const double xx = lo_is_zero ? dist_a : x;
    const double delta = hi_is_one ? dist_b : 1.0 - x;
    return 1.0 / r_eval(xx, delta, t, cfg);
  };
}

double height_integral(double a, double b, double t, const SlabConfig& cfg,
                       const QuadratureSpec& quad) {
  return integrate(shape_recip_integrand(a, b, t, cfg), a, b, quad).value;
}

// radius_from_height against a precomputed span (avoids re-deriving it once
// per grid node in profile sweeps).
double invert_height(double y, double t, double span, const SlabConfig& cfg,
                     const QuadratureSpec& quad, std::optional<double> hint) {
  if (y < -1e-12 * span || y > span * (1.0 + 1e-12))
    throw std::invalid_argument("height outside [0, span]");
  if (y <= 0.0) return 1.0;
  if (y >= span) return 0.0;

  const double tol = std::max(10.0 * quad.rel_tol, 1e-12) * span;
  QuadratureSpec inc = quad;
  inc.abs_tol = std::max(quad.abs_tol, 0.05 * tol);

  double lo = 0.0, hi = 1.0;  // height(lo) = span >= y >= 0 = height(hi)
  double xc = hint ? std::clamp(*hint, 1e-15, 1.0 - 1e-15)
                   : std::pow(std::cos(0.5 * kPi * y / span), 2);  // exact at t = 1
  double zc = height_integral(xc, 1.0, t, cfg, inc);

  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(zc - y) <= tol) return xc;
    if (zc > y)
      lo = xc;
    else
      hi = xc;
    const double rm = r_eval(xc, 1.0 - xc, t, cfg);
    double xn = rm > 0.0 ? xc + (zc - y) * rm : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (xn == xc) return xc;  // bracket exhausted at machine resolution
    // Incremental height update: integrate only across the step.
    const double seg = xn > xc ? height_integral(xc, xn, t, cfg, inc)
                               : -height_integral(xn, xc, t, cfg, inc);
    zc -= seg;
    xc = xn;
  }
  throw RootBracketError(
      "height inversion failed to converge; quadrature tolerances are likely "
      "inconsistent with the requested accuracy");
}

double profile_value(double z, double t, const SlabConfig& cfg,
                     const QuadratureSpec& quad) {
  const double span = height_span(t, cfg, quad);
  const double x = invert_height(span * (z / cfg.d), t, span, cfg, quad,
                                 std::nullopt);
  return cfg.d / span * (1.0 - (1.0 - t) * x);
}

}  // namespace

double curvature_factor(double t, const SlabConfig& cfg) {
  require_positive_t(t);
  const int n = cfg.n;
  if (t == 1.0) return static_cast<double>(n - 1) / n;
  const double lt = std::log(t);
  if (n * lt > 300.0) {
    // rescale by t^{-n} so nothing overflows for large t
    return std::exp(-lt) * std::expm1(-(n - 1) * lt) / std::expm1(-n * lt);
  }
  return std::expm1((n - 1) * lt) / std::expm1(n * lt);
}

double curvature_factor_slope(double t, const SlabConfig& cfg) {
  require_positive_t(t);
  const int n = cfg.n;
  if (t == 1.0) return -static_cast<double>(n - 1) / (2.0 * n);
  const double eps = 1.0 - t;
  const double lt = std::log(t);
  if (std::abs(eps) <= 0.1) {
    // numerator t^n - nt + n - 1 expanded exactly: sum_{k=2}^n C(n,k)(-eps)^k
    double term = 0.5 * n * (n - 1) * eps * eps;  // k = 2
    double num = term;
    for (int k = 3; k <= n; ++k) {
      term *= -eps * (n - k + 1) / k;
      num += term;
    }
    const double den = std::expm1(n * lt);
    return -std::exp((n - 2) * lt) * num / (den * den);
  }
  if (n * lt > 300.0) {
    const double den = std::expm1(-n * lt);
    const double num =
        1.0 - n * std::exp((1 - n) * lt) + (n - 1) * std::exp(-n * lt);
    return -std::exp(-(n + 2) * lt) * num / (den * den);
  }
  const double tn = std::exp(n * lt);
  const double num = tn - n * t + (n - 1);
  const double den = 1.0 - tn;
  return -std::exp((n - 2) * lt) * num / (den * den);
}

double slope_shape(double x, double t, const SlabConfig& cfg) {
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("shape coordinate x must lie in [0, 1]");
  require_positive_t(t);
  // 1 - x is exact for x >= 1/2, and the x <= 1/2 branch never uses it.
  return r_eval(x, 1.0 - x, t, cfg);
}

double slope_shape_from_ends(double x, double one_minus_x, double t,
                             const SlabConfig& cfg) {
  if (x < 0.0 || one_minus_x < 0.0)
    throw std::invalid_argument("endpoint distances must be nonnegative");
  require_positive_t(t);
  return r_eval(x, one_minus_x, t, cfg);
}

double height_from_radius(double x, double t, const SlabConfig& cfg,
                          const QuadratureSpec& quad) {
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("shape coordinate x must lie in [0, 1]");
  require_admissible_t(t, cfg);
  validate(quad);
  if (x >= 1.0) return 0.0;
  return height_integral(x, 1.0, t, cfg, quad);
}

double height_span(double t, const SlabConfig& cfg, const QuadratureSpec& quad) {
  return height_from_radius(0.0, t, cfg, quad);
}

double radius_from_height(double y, double t, const SlabConfig& cfg,
                          const QuadratureSpec& quad, std::optional<double> hint) {
  require_admissible_t(t, cfg);
  validate(quad);
  const double span = height_span(t, cfg, quad);
  return invert_height(y, t, span, cfg, quad, hint);
}

ProfilePoint profile_point(double z, double r, double t, const SlabConfig& cfg,
                           const QuadratureSpec& quad) {
  require_admissible_t(t, cfg);
  require_admissible_t(r, cfg);
  validate(quad);
  const double qt = curvature_factor(t, cfg);
  const double pt = height_span(t, cfg, quad);
  const double qr = curvature_factor(r, cfg);
  const double pr = height_span(r, cfg, quad);
  const double z_max = qr * pr * cfg.d / (qt * pt);
  if (z < -1e-12 * z_max || z > z_max * (1.0 + 1e-12))
    throw std::invalid_argument("profile height z outside the admissible interval");
  const double scale = qr * cfg.d / (pt * qt);
  if (r == 1.0) return {scale, 0.0};  // the two-parameter family degenerates
  const double y = qt * pt * z / (qr * cfg.d);
  const double x = invert_height(std::clamp(y, 0.0, pr), r, pr, cfg, quad,
                                 std::nullopt);
  return {scale * (1.0 - (1.0 - r) * x),
          (1.0 - r) * r_eval(x, 1.0 - x, r, cfg)};
}

ProfileSamples profile_samples(const FamilyParam& param, const SlabConfig& cfg,
                               const QuadratureSpec& quad, int N) {
  if (N < 16) throw std::invalid_argument("profile grids need at least 16 cells");
  if (param.r && *param.r != param.t)
    throw std::invalid_argument("sampled profiles live on the diagonal r = t");
  require_admissible_t(param.t, cfg);
  validate(quad);
  validate(cfg);

  const double t = param.t;
  const int n = cfg.n;
  const double span = height_span(t, cfg, quad);
  const double q = curvature_factor(t, cfg);
  const double scale = cfg.d / span;
  const double eta = n * q * span / cfg.d;

  ProfileSamples out;
  out.t = param;
  out.eta = eta;
  out.grid.resize(static_cast<size_t>(N) + 1);
  out.v.resize(static_cast<size_t>(N) + 1);
  out.v_z.resize(static_cast<size_t>(N) + 1);
  out.v_zz.resize(static_cast<size_t>(N) + 1);

  double x_prev = 1.0;
  for (int i = 0; i <= N; ++i) {
    const double z = cfg.d * i / N;
    const double y = span * i / N;
    double x;
    if (i == 0)
      x = 1.0;
    else if (i == N)
      x = 0.0;
    else if (i == 1)  // hint would pin the Newton start on the singular end
      x = invert_height(y, t, span, cfg, quad, std::nullopt);
    else
      x = invert_height(y, t, span, cfg, quad, x_prev);
    x_prev = x;

    const double vz = (1.0 - t) * r_eval(x, 1.0 - x, t, cfg);
    const double v = scale * (1.0 - (1.0 - t) * x);
    const double slope2 = 1.0 + vz * vz;
    out.grid[static_cast<size_t>(i)] = z;
    out.v[static_cast<size_t>(i)] = v;
    out.v_z[static_cast<size_t>(i)] = vz;
    // curvature from the constant-mean-curvature identity (exact, no noise)
    out.v_zz[static_cast<size_t>(i)] =
        slope2 * ((n - 1) / v - eta * std::sqrt(slope2));
  }
  return out;
}

Estimate profile_t_derivative(double z, double t, const SlabConfig& cfg,
                              const QuadratureSpec& quad, double h) {
  require_admissible_t(t, cfg);
  validate(quad);
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  if (h < 1e3 * std::numeric_limits<double>::epsilon() * t)
    throw StepError("parametric-derivative step underflow");
  if (t - 2.0 * h <= cfg.t_floor)
    throw std::invalid_argument("step reaches below the neck-parameter floor");
  if ((t + 2.0 * h) * cfg.t_floor > 1.0)
    throw std::invalid_argument("step reaches above the admissible range");

  auto f = [&](double tt) { return profile_value(z, tt, cfg, quad); };
  auto stencil = [&](double hh) {
    return (f(t - 2.0 * hh) - 8.0 * f(t - hh) + 8.0 * f(t + hh) - f(t + 2.0 * hh)) /
           (12.0 * hh);
  };
  const double coarse = stencil(h);
  const double fine = stencil(0.5 * h);
  const double value = (16.0 * fine - coarse) / 15.0;
  return {value, std::abs(value - fine)};
}

GridDerivative profile_t_derivative_grid(double t, const SlabConfig& cfg,
                                         const QuadratureSpec& quad, int N,
                                         double h) {
  require_admissible_t(t, cfg);
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  if (h < 1e3 * std::numeric_limits<double>::epsilon() * t)
    throw StepError("parametric-derivative step underflow");
  if (t - 2.0 * h <= cfg.t_floor)
    throw std::invalid_argument("step reaches below the neck-parameter floor");
  if ((t + 2.0 * h) * cfg.t_floor > 1.0)
    throw std::invalid_argument("step reaches above the admissible range");

  auto at = [&](double tt) { return profile_samples({tt, {}}, cfg, quad, N); };
  const ProfileSamples m2 = at(t - 2.0 * h), m1 = at(t - h), mh = at(t - 0.5 * h);
  const ProfileSamples p2 = at(t + 2.0 * h), p1 = at(t + h), ph = at(t + 0.5 * h);

  GridDerivative out;
  out.values.resize(static_cast<size_t>(N) + 1);
  double worst = 0.0;
  for (size_t i = 0; i <= static_cast<size_t>(N); ++i) {
    const double coarse =
        (m2.v[i] - 8.0 * m1.v[i] + 8.0 * p1.v[i] - p2.v[i]) / (12.0 * h);
    const double fine =
        (m1.v[i] - 8.0 * mh.v[i] + 8.0 * ph.v[i] - p1.v[i]) / (6.0 * h);
    const double value = (16.0 * fine - coarse) / 15.0;
    out.values[i] = value;
    worst = std::max(worst, std::abs(value - fine));
  }
  out.error = worst;
  return out;
}

}  // namespace unduloid
