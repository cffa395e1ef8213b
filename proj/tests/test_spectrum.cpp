#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "unduloid/calculus.hpp"
#include "unduloid/family.hpp"
#include "unduloid/spectrum.hpp"

using namespace unduloid;

namespace {

constexpr double kPi = std::numbers::pi;

const SlabConfig kCfg{};  // n = 8, d = 1, t_floor = 1e-3

// Frozen references from tools/make_reference_values.py (mpmath, 30-digit
// working precision); n = 8, d = 1.
constexpr double kCriticalLow = 0.334888296257447545;   // volume minimum
constexpr double kCriticalHigh = 0.492833642497955739;  // volume maximum

DiscretizedOperator make_operator(double t, const SlabConfig& cfg, int N,
                                  const QuadratureSpec& quad = {}) {
  FamilyParam param;
  param.t = t;
  return assemble_operator(profile_samples(param, cfg, quad, N), cfg);
}

// Exact eigenvalue of the discrete cylinder operator for the cosine mode k.
double cylinder_mode(int k, int N, double d) {
  const double step = d / N;
  return (2.0 - 2.0 * std::cos(k * kPi / N)) / (step * step) - kPi * kPi / (d * d);
}

double m_norm(const DiscretizedOperator& op, const std::vector<double>& w) {
  return std::sqrt(weighted_inner(op, w, w));
}

}  // namespace

TEST_CASE("assembly validates its input") {
  const QuadratureSpec quad{};
  FamilyParam param;
  param.t = 0.7;
  const ProfileSamples coarse = profile_samples(param, kCfg, quad, 64);
  CHECK_THROWS_AS(assemble_operator(coarse, kCfg), std::invalid_argument);

  ProfileSamples broken = profile_samples(param, kCfg, quad, 128);
  CHECK_NOTHROW(assemble_operator(broken, kCfg));
  broken.v.pop_back();
  CHECK_THROWS_AS(assemble_operator(broken, kCfg), std::invalid_argument);

  const DiscretizedOperator op = make_operator(0.7, kCfg, 128);
  for (std::size_t i = 0; i < op.grid.size(); ++i) {
    CHECK(op.p[i] > 0.0);
    CHECK(op.weight_m[i] > 0.0);
    CHECK(op.q0[i] < 0.0);
  }
  CHECK_THROWS_AS(apply_dh(op, std::vector<double>(4, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(eigen_spectrum(op, 0), std::invalid_argument);
  CHECK_THROWS_AS(eigen_spectrum(op, 33), std::invalid_argument);  // > N/4
}

TEST_CASE("cylinder operator reduces to the constant-coefficient form") {
  const int N = 256;
  const DiscretizedOperator op = make_operator(1.0, kCfg, N);

  // constant coefficients
  for (std::size_t i = 0; i < op.grid.size(); ++i) {
    CHECK(op.p[i] == doctest::Approx(op.p[0]).epsilon(1e-13));
    CHECK(op.q0[i] == doctest::Approx(op.q0[0]).epsilon(1e-13));
  }

  // DH[1] = -(n-1)/v^2 = -pi^2/d^2 on the cylinder
  const std::vector<double> ones(op.grid.size(), 1.0);
  const std::vector<double> dh1 = apply_dh(op, ones);
  for (double x : dh1) CHECK(x == doctest::Approx(-kPi * kPi).epsilon(1e-12));

  // the sampled cosine is an exact discrete eigenvector
  std::vector<double> mode(op.grid.size());
  for (int i = 0; i <= N; ++i) mode[i] = std::cos(kPi * i / N);
  const double lambda = cylinder_mode(1, N, kCfg.d);
  const std::vector<double> image = apply_dh(op, mode);
  for (int i = 0; i <= N; ++i)
    CHECK(std::abs(image[i] - lambda * mode[i]) <= 1e-8);
}

TEST_CASE("constrained application removes the weighted mean") {
  const DiscretizedOperator op = make_operator(0.6, kCfg, 256);
  const std::size_t size = op.grid.size();

  const std::vector<double> ones(size, 1.0);
  const std::vector<double> a1 = apply_constrained(op, ones);
  CHECK(std::abs(weighted_mean(op, a1)) <= 1e-12);

  std::vector<double> w(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double z = op.grid[i];
    w[i] = std::sin(3.0 * z) + z * z;
  }
  const std::vector<double> aw = apply_constrained(op, w);
  double scale = 0.0;
  for (double x : aw) scale = std::max(scale, std::abs(x));
  CHECK(std::abs(weighted_mean(op, aw)) <= 1e-12 * scale);
}

TEST_CASE("the operator is self-adjoint in the weighted inner product") {
  const DiscretizedOperator op = make_operator(0.55, kCfg, 256);
  const std::size_t size = op.grid.size();

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> w(size), phi(size);
  for (std::size_t i = 0; i < size; ++i) {
    w[i] = unit(rng);
    phi[i] = unit(rng);
  }

  const double bound = 1e-10 * m_norm(op, w) * m_norm(op, phi);
  CHECK(std::abs(weighted_inner(op, apply_dh(op, w), phi) -
                 weighted_inner(op, w, apply_dh(op, phi))) <= bound);

  // the constrained operator is self-adjoint on its own domain, the
  // mean-free subspace
  const double mw = weighted_mean(op, w), mphi = weighted_mean(op, phi);
  for (std::size_t i = 0; i < size; ++i) {
    w[i] -= mw;
    phi[i] -= mphi;
  }
  CHECK(std::abs(weighted_inner(op, apply_constrained(op, w), phi) -
                 weighted_inner(op, w, apply_constrained(op, phi))) <= bound);
}

TEST_CASE("cylinder spectrum matches the closed form") {
  const int N = 512;
  const DiscretizedOperator op = make_operator(1.0, kCfg, N);
  const SpectrumResult spec = eigen_spectrum(op, 3);
  REQUIRE(spec.eigenvalues.size() == 3);
  CHECK(spec.N == N);

  for (int j = 0; j < 3; ++j) {
    const int k = j + 1;
    // against the exact discrete eigenvalue
    CHECK(std::abs(spec.eigenvalues[j] - cylinder_mode(k, N, kCfg.d)) <= 1e-7);
    // against the continuum limit (k^2 - 1) pi^2, within the second-order
    // truncation budget
    const double continuum = (k * k - 1.0) * kPi * kPi;
    const double budget =
        1.1 * std::pow(k * kPi, 4) / 12.0 / (static_cast<double>(N) * N);
    CHECK(std::abs(spec.eigenvalues[j] - continuum) <= budget);

    // eigenfunctions are the sampled cosines, m-normalized
    std::vector<double> mode(op.grid.size());
    for (int i = 0; i <= N; ++i) mode[i] = std::cos(k * kPi * i / N);
    const double norm = m_norm(op, mode);
    for (int i = 0; i <= N; ++i)
      CHECK(std::abs(mode[i] / norm - spec.eigenfunctions[j][i]) <= 1e-9);
  }
}

TEST_CASE("cylinder eigenvalues converge at second order") {
  std::vector<std::vector<double>> errs;
  for (int N : {256, 512, 1024}) {
    const DiscretizedOperator op = make_operator(1.0, kCfg, N);
    const SpectrumResult spec = eigen_spectrum(op, 3);
    std::vector<double> row(3);
    for (int j = 0; j < 3; ++j)
      row[j] = std::abs(spec.eigenvalues[j] - (j + 2.0) * j * kPi * kPi);
    errs.push_back(row);
  }
  for (int j = 0; j < 3; ++j) {
    const double order_a = std::log2(errs[0][j] / errs[1][j]);
    const double order_b = std::log2(errs[1][j] / errs[2][j]);
    CHECK(order_a >= 1.8);
    CHECK(order_b >= 1.8);
    CHECK(order_a <= 2.2);
    CHECK(order_b <= 2.2);
  }
}

TEST_CASE("eigenpair invariants hold across the family") {
  struct Case {
    int n;
    double t;
  };
  const Case cases[] = {{8, 0.3}, {8, 0.6}, {8, 0.95}, {3, 0.5}};
  for (const Case& c : cases) {
    CAPTURE(c.n);
    CAPTURE(c.t);
    SlabConfig cfg = kCfg;
    cfg.n = c.n;
    const DiscretizedOperator op = make_operator(c.t, cfg, 256);
    const SpectrumResult spec = eigen_spectrum(op, 6);

    double min_v = op.v[0];
    for (double v : op.v) min_v = std::min(min_v, v);
    const double lower =
        -(cfg.n - 1) / (min_v * min_v) - 1e-2 * kPi * kPi / (cfg.d * cfg.d);

    for (int j = 0; j < 6; ++j) {
      const double lambda = spec.eigenvalues[j];
      const std::vector<double>& w = spec.eigenfunctions[j];
      if (j > 0) CHECK(lambda >= spec.eigenvalues[j - 1]);
      CHECK(lambda >= lower);
      CHECK(std::abs(weighted_inner(op, w, w) - 1.0) <= 1e-12);

      // constraint and residual in the weighted norm
      double constraint = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i)
        constraint += op.weight_m[i] * w[i];
      CHECK(std::abs(constraint) <= 1e-10);

      const std::vector<double> aw = apply_constrained(op, w);
      double res = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double r = aw[i] - lambda * w[i];
        res += op.weight_m[i] * r * r;
      }
      CHECK(std::sqrt(res) <= 1e-6 * std::max(1.0, std::abs(lambda)));

      // Rayleigh-quotient sign consistency in the area-weighted form
      if (std::abs(lambda) > 1e-3)
        CHECK(quadratic_form_ratio(op, w) * lambda > 0.0);
    }
  }
}

TEST_CASE("near-cylinder negative counts distinguish dimensions") {
  const double threshold = -1e-4 * kPi * kPi;
  for (int n : {8, 11}) {
    CAPTURE(n);
    SlabConfig cfg = kCfg;
    cfg.n = n;
    const DiscretizedOperator op = make_operator(0.95, cfg, 512);
    const SpectrumResult spec = eigen_spectrum(op, 4);
    int negatives = 0;
    for (double lambda : spec.eigenvalues)
      if (lambda < threshold) ++negatives;
    CHECK(negatives == (n == 8 ? 1 : 0));
    if (n == 11) CHECK(spec.eigenvalues[0] > 0.0);
  }
}

TEST_CASE("branch tracking crosses the volume minimum") {
  const QuadratureSpec quad{};
  const auto branch = track_eigenvalue(kCfg, quad, {0.32, 0.35}, 30, 1);
  REQUIRE(branch.size() == 31);
  CHECK(branch.front().lambda < 0.0);
  CHECK(branch.back().lambda > 0.0);

  bool found = false;
  for (std::size_t i = 1; i < branch.size(); ++i) {
    CHECK(branch[i].overlap >= 0.99);
    if (!found && branch[i - 1].lambda < 0.0 && branch[i].lambda >= 0.0) {
      found = true;
      CHECK(branch[i - 1].t <= kCriticalLow + 1e-3);
      CHECK(branch[i].t >= kCriticalLow - 1e-3);
    }
  }
  CHECK(found);
}

TEST_CASE("branch tracking passes smoothly through the cylinder") {
  const QuadratureSpec quad{};
  const auto branch = track_eigenvalue(kCfg, quad, {0.95, 1.0}, 10, 1);
  CHECK(branch.front().lambda < 0.0);              // n = 8: soft mode negative
  CHECK(std::abs(branch.back().lambda) <= 1e-3);   // zero at the cylinder
  for (std::size_t i = 1; i < branch.size(); ++i) CHECK(branch[i].overlap >= 0.99);
}

TEST_CASE("fine sweeps keep successive overlaps near one") {
  const QuadratureSpec quad{};
  const auto branch = track_eigenvalue(kCfg, quad, {0.55, 0.65}, 64, 1);
  REQUIRE(branch.size() == 65);
  for (std::size_t i = 1; i < branch.size(); ++i) CHECK(branch[i].overlap >= 0.99);
}

TEST_CASE("tracking validates its arguments") {
  const QuadratureSpec quad{};
  CHECK_THROWS_AS(track_eigenvalue(kCfg, quad, {0.5, 0.6}, 7, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(track_eigenvalue(kCfg, quad, {0.5, 0.6}, 10, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(track_eigenvalue(kCfg, quad, {0.6, 0.5}, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(track_eigenvalue(kCfg, quad, {0.5, 1.2}, 10, 1),
                  std::invalid_argument);

  const BranchLossError loss("lost", 0.42);
  CHECK(loss.best_overlap == doctest::Approx(0.42));
}

TEST_CASE("slope formula and continuation agree at the volume extrema") {
  const QuadratureSpec quad{};

  const SlopeComparison at_min =
      eigenvalue_slope_at_critical(kCriticalLow, kCfg, quad, 512);
  CHECK(at_min.formula_value > 0.0);
  CHECK(at_min.continuation_value > 0.0);
  CHECK(std::abs(at_min.formula_value - at_min.continuation_value) <=
        5e-2 * std::abs(at_min.formula_value));

  const SlopeComparison at_max =
      eigenvalue_slope_at_critical(kCriticalHigh, kCfg, quad, 512);
  CHECK(at_max.formula_value < 0.0);
  CHECK(at_max.continuation_value < 0.0);
  CHECK(std::abs(at_max.formula_value - at_max.continuation_value) <=
        5e-2 * std::abs(at_max.formula_value));

  // sign law: the slope has the sign of -V'' eta'
  const Estimate v2 = enclosed_volume_curvature(kCriticalLow, kCfg, quad);
  const Estimate eta1 = mean_curvature_slope(kCriticalLow, kCfg, quad);
  CHECK(at_min.formula_value * (-v2.value * eta1.value) > 0.0);
}

TEST_CASE("the cylinder is a critical point with zero slope") {
  const QuadratureSpec quad{};
  const SlopeComparison at_one = eigenvalue_slope_at_critical(1.0, kCfg, quad, 256);
  CHECK(std::abs(at_one.formula_value) <= 1e-3);
  CHECK(std::abs(at_one.continuation_value) <= 1e-3);
}

TEST_CASE("slope comparison rejects non-critical and invalid input") {
  const QuadratureSpec quad{};
  CHECK_THROWS_AS(eigenvalue_slope_at_critical(0.7, kCfg, quad, 256),
                  std::invalid_argument);
  CHECK_THROWS_AS(eigenvalue_slope_at_critical(kCriticalLow, kCfg, quad, 64),
                  std::invalid_argument);
  CHECK_THROWS_AS(eigenvalue_slope_at_critical(0.0, kCfg, quad, 256),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      quadratic_form_ratio(make_operator(0.7, kCfg, 128),
                           std::vector<double>(129, 0.0)),
      std::invalid_argument);
}

TEST_CASE("the parametric derivative maps to the curvature slope") {
  // DH(v)[v_t] is the constant eta'(t): v_t is the Jacobi direction of the
  // family, and the flux map sends it to the curvature's rate of change.
  const double t = 0.6;
  const int N = 2048;
  QuadratureSpec tight;
  tight.rel_tol = 1e-14;

  const Estimate eta1 = mean_curvature_slope(t, kCfg, tight);
  const DiscretizedOperator op = make_operator(t, kCfg, N, tight);
  const GridDerivative vt = profile_t_derivative_grid(t, kCfg, tight, N, 1e-3);
  const std::vector<double> image = apply_dh(op, vt.values);

  double dev = 0.0;
  for (double x : image) dev = std::max(dev, std::abs(x - eta1.value));
  CHECK(dev <= 1e-3 * std::abs(eta1.value));
}
