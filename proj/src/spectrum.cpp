#include "unduloid/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "unduloid/calculus.hpp"
#include "unduloid/geometry.hpp"

#ifdef UNDULOID_HAVE_LAPACKE
#include <lapacke.h>
#else
#include <Eigen/Dense>
#endif

namespace unduloid {

namespace {

// ===== ASSEMBLY =====

double cell_length(const DiscretizedOperator& op, std::size_t i) {
  const std::size_t last = op.grid.size() - 1;
  return (i == 0 || i == last) ? 0.5 * op.dz : op.dz;
}

void check_vector(const DiscretizedOperator& op, const std::vector<double>& w,
                  const char* who) {
  if (w.size() != op.grid.size())
    throw std::invalid_argument(std::string(who) +
                                ": nodal vector length does not match the grid");
}

// Symmetric tridiagonal core: (T w)_i = flux differences of p w' over the
// cell around node i plus q0_i c_i w_i.  The missing fluxes at the walls
// realize the reflection (zero-slope) boundary condition.
std::vector<double> apply_t(const DiscretizedOperator& op,
                            const std::vector<double>& w) {
  const std::size_t last = op.grid.size() - 1;
  std::vector<double> out(last + 1);
  for (std::size_t i = 0; i <= last; ++i) {
    double acc = op.q0[i] * cell_length(op, i) * w[i];
    if (i > 0) acc += 0.5 * (op.p[i - 1] + op.p[i]) * (w[i] - w[i - 1]) / op.dz;
    if (i < last) acc += 0.5 * (op.p[i] + op.p[i + 1]) * (w[i] - w[i + 1]) / op.dz;
    out[i] = acc;
  }
  return out;
}

// ===== DENSE SYMMETRIC SOLVE =====

// Lowest k eigenpairs of a dense symmetric matrix held column-major.
// Destroys the input.  Eigenvectors come back as unit columns of z.
void lowest_eigenpairs(std::vector<double>& a, std::size_t size, int k,
                       std::vector<double>& evals, std::vector<double>& z) {
  evals.assign(static_cast<std::size_t>(k), 0.0);
  z.assign(static_cast<std::size_t>(k) * size, 0.0);
#ifdef UNDULOID_HAVE_LAPACKE
  const lapack_int nn = static_cast<lapack_int>(size);
  lapack_int found = 0;
  std::vector<double> all_evals(size);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(k));
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', nn, a.data(), nn, 0.0, 0.0, 1,
      static_cast<lapack_int>(k), 0.0, &found, all_evals.data(), z.data(), nn,
      isuppz.data());
  if (info != 0 || found < static_cast<lapack_int>(k))
    throw EigensolveError("dense symmetric eigensolve failed (dsyevr info " +
                          std::to_string(info) + ")");
  std::copy(all_evals.begin(), all_evals.begin() + k, evals.begin());
#else
  Eigen::Map<const Eigen::MatrixXd> mat(a.data(),
                                        static_cast<Eigen::Index>(size),
                                        static_cast<Eigen::Index>(size));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat);
  if (es.info() != Eigen::Success)
    throw EigensolveError("dense symmetric eigensolve failed to converge");
  for (int j = 0; j < k; ++j) {
    evals[static_cast<std::size_t>(j)] = es.eigenvalues()(j);
    for (std::size_t i = 0; i < size; ++i)
      z[static_cast<std::size_t>(j) * size + i] = es.eigenvectors()(static_cast<Eigen::Index>(i), j);
  }
#endif
}

// ===== BRANCH TRACKING =====

// Shared sweep: follow one eigenvalue branch over [lo, hi] by maximal
// weighted overlap of consecutive eigenfunctions.  first_index picks the
// starting mode (0-based); a negative value selects the eigenvalue of
// smallest magnitude at the left endpoint.
std::vector<TrackedEigenvalue> follow_branch(const SlabConfig& cfg,
                                             const QuadratureSpec& quad,
                                             double lo, double hi, int steps,
                                             int N, int k, int first_index) {
  std::vector<TrackedEigenvalue> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  std::vector<double> w_prev;
  for (int j = 0; j <= steps; ++j) {
    const double tj = (j == steps) ? hi : lo + (hi - lo) * j / steps;
    FamilyParam param;
    param.t = tj;
    const ProfileSamples samples = profile_samples(param, cfg, quad, N);
    const DiscretizedOperator op = assemble_operator(samples, cfg);
    const SpectrumResult spec = eigen_spectrum(op, k);
    int pick = 0;
    double overlap = 1.0;
    if (j == 0) {
      if (first_index >= 0) {
        pick = first_index;
      } else {
        for (int i = 1; i < k; ++i)
          if (std::fabs(spec.eigenvalues[static_cast<std::size_t>(i)]) <
              std::fabs(spec.eigenvalues[static_cast<std::size_t>(pick)]))
            pick = i;
      }
    } else {
      double best = -1.0;
      for (int i = 0; i < k; ++i) {
        const double o = std::fabs(
            weighted_inner(op, w_prev, spec.eigenfunctions[static_cast<std::size_t>(i)]));
        if (o > best) {
          best = o;
          pick = i;
        }
      }
      if (best < 0.8) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "eigenvalue branch lost near t = %.6g (best overlap %.3g)",
                      tj, best);
        throw BranchLossError(buf, best);
      }
      overlap = best;
    }
    std::vector<double> w = spec.eigenfunctions[static_cast<std::size_t>(pick)];
    if (j > 0 && weighted_inner(op, w_prev, w) < 0.0)
      for (double& x : w) x = -x;
    out.push_back({tj, spec.eigenvalues[static_cast<std::size_t>(pick)], overlap});
    w_prev = std::move(w);
  }
  return out;
}

}  // namespace

DiscretizedOperator assemble_operator(const ProfileSamples& samples,
                                      const SlabConfig& cfg) {
  validate(cfg);
  const std::size_t size = samples.grid.size();
  if (size < 129)
    throw std::invalid_argument("assemble_operator requires at least 128 cells");
  if (samples.v.size() != size || samples.v_z.size() != size)
    throw std::invalid_argument(
        "assemble_operator: profile columns do not match the grid");
  DiscretizedOperator op;
  op.cfg = cfg;
  op.t = samples.t.t;
  op.eta = samples.eta;
  op.grid = samples.grid;
  op.v = samples.v;
  op.v_z = samples.v_z;
  op.dz = samples.grid[1] - samples.grid[0];
  const std::size_t last = size - 1;
  op.p.resize(size);
  op.q0.resize(size);
  op.weight_m.resize(size);
  for (std::size_t i = 0; i <= last; ++i) {
    const double v = samples.v[i];
    const double vz = samples.v_z[i];
    if (!(v > 0.0) || !std::isfinite(v) || !std::isfinite(vz))
      throw std::invalid_argument(
          "assemble_operator: profile samples must be positive and finite");
    const double vn1 = std::pow(v, cfg.n - 1);
    const double s2 = 1.0 + vz * vz;
    const double root = std::sqrt(s2);
    op.p[i] = vn1 / (s2 * root);
    op.q0[i] = -(cfg.n - 1) * vn1 / (v * v * root);
    op.weight_m[i] = vn1 * ((i == 0 || i == last) ? 0.5 * op.dz : op.dz);
  }
  return op;
}

std::vector<double> apply_dh(const DiscretizedOperator& op,
                             const std::vector<double>& w) {
  check_vector(op, w, "apply_dh");
  std::vector<double> out = apply_t(op, w);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] /= op.weight_m[i];
  return out;
}

double weighted_mean(const DiscretizedOperator& op, const std::vector<double>& w) {
  check_vector(op, w, "weighted_mean");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    num += op.weight_m[i] * w[i];
    den += op.weight_m[i];
  }
  return num / den;
}

double weighted_inner(const DiscretizedOperator& op, const std::vector<double>& a,
                      const std::vector<double>& b) {
  check_vector(op, a, "weighted_inner");
  check_vector(op, b, "weighted_inner");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += op.weight_m[i] * a[i] * b[i];
  return acc;
}

std::vector<double> apply_constrained(const DiscretizedOperator& op,
                                      const std::vector<double>& w) {
  std::vector<double> out = apply_dh(op, w);
  const double mean = weighted_mean(op, out);
  for (double& x : out) x -= mean;
  return out;
}

// ===== EIGENSOLVE =====

SpectrumResult eigen_spectrum(const DiscretizedOperator& op, int k) {
  const std::size_t size = op.grid.size();
  const int ncells = static_cast<int>(size) - 1;
  if (k < 1 || k > ncells / 4)
    throw std::invalid_argument("eigen_spectrum requires 1 <= k <= N/4");

  // Similarity transform by the square root of the weight turns the
  // generalized problem T w = lambda M w into an ordinary symmetric one,
  // still tridiagonal.  The constant direction (u below) is deflated by
  // projection and parked above the spectrum so the k lowest eigenvalues of
  // the dense matrix are exactly the k lowest constrained ones.
  const std::size_t last = size - 1;
  std::vector<double> sqm(size), u(size);
  double total_m = 0.0;
  for (std::size_t i = 0; i < size; ++i) {
    sqm[i] = std::sqrt(op.weight_m[i]);
    total_m += op.weight_m[i];
  }
  const double unorm = std::sqrt(total_m);
  for (std::size_t i = 0; i < size; ++i) u[i] = sqm[i] / unorm;

  std::vector<double> sdiag(size), soff(last);
  for (std::size_t i = 0; i < size; ++i) {
    double acc = op.q0[i] * cell_length(op, i);
    if (i > 0) acc += 0.5 * (op.p[i - 1] + op.p[i]) / op.dz;
    if (i < last) acc += 0.5 * (op.p[i] + op.p[i + 1]) / op.dz;
    sdiag[i] = acc / op.weight_m[i];
  }
  for (std::size_t i = 0; i < last; ++i)
    soff[i] = -0.5 * (op.p[i] + op.p[i + 1]) / op.dz / (sqm[i] * sqm[i + 1]);

  std::vector<double> su(size);
  for (std::size_t i = 0; i < size; ++i) {
    double acc = sdiag[i] * u[i];
    if (i > 0) acc += soff[i - 1] * u[i - 1];
    if (i < last) acc += soff[i] * u[i + 1];
    su[i] = acc;
  }
  double usu = 0.0;
  for (std::size_t i = 0; i < size; ++i) usu += u[i] * su[i];

  double gershgorin = sdiag[0] + std::fabs(soff[0]);
  for (std::size_t i = 1; i < size; ++i) {
    double row = sdiag[i];
    if (i > 0) row += std::fabs(soff[i - 1]);
    if (i < last) row += std::fabs(soff[i]);
    gershgorin = std::max(gershgorin, row);
  }
  const double sigma = gershgorin + 1.0;

  std::vector<double> a(size * size);
  for (std::size_t j = 0; j < size; ++j) {
    for (std::size_t i = 0; i < size; ++i) {
      double val = -u[i] * su[j] - su[i] * u[j] + (usu + sigma) * u[i] * u[j];
      if (i == j)
        val += sdiag[i];
      else if (i + 1 == j)
        val += soff[i];
      else if (j + 1 == i)
        val += soff[j];
      a[i + j * size] = val;
    }
  }

  std::vector<double> evals, z;
  lowest_eigenpairs(a, size, k, evals, z);

  SpectrumResult result;
  result.t = op.t;
  result.N = ncells;
  result.eigenvalues = std::move(evals);
  result.eigenfunctions.resize(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const double* y = z.data() + static_cast<std::size_t>(j) * size;
    std::vector<double> w(size);
    double uy = 0.0;
    for (std::size_t i = 0; i < size; ++i) uy += u[i] * y[i];
    double norm2 = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      const double yi = y[i] - uy * u[i];
      w[i] = yi / sqm[i];
      norm2 += yi * yi;
    }
    const double norm = std::sqrt(norm2);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < size; ++i)
      if (std::fabs(w[i]) > std::fabs(w[peak])) peak = i;
    const double scale = (w[peak] < 0.0) ? -1.0 / norm : 1.0 / norm;
    for (double& x : w) x *= scale;
    result.eigenfunctions[static_cast<std::size_t>(j)] = std::move(w);
  }
  return result;
}

double quadratic_form_ratio(const DiscretizedOperator& op,
                            const std::vector<double>& w) {
  check_vector(op, w, "quadratic_form_ratio");
  const std::size_t last = op.grid.size() - 1;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < last; ++i) {
    const double dw = w[i + 1] - w[i];
    num += 0.5 * (op.p[i] + op.p[i + 1]) * dw * dw / op.dz;
  }
  for (std::size_t i = 0; i <= last; ++i) {
    const double c = cell_length(op, i);
    num += op.q0[i] * c * w[i] * w[i];
    const double s2 = 1.0 + op.v_z[i] * op.v_z[i];
    den += std::pow(op.v[i], op.cfg.n - 1) / std::sqrt(s2) * c * w[i] * w[i];
  }
  if (!(den > 0.0))
    throw std::invalid_argument("quadratic_form_ratio needs a nonzero test function");
  return num / den;
}

std::vector<TrackedEigenvalue> track_eigenvalue(const SlabConfig& cfg,
                                                const QuadratureSpec& quad,
                                                std::pair<double, double> t_range,
                                                int steps, int mode_index) {
  validate(cfg);
  validate(quad);
  const double lo = t_range.first;
  const double hi = t_range.second;
  if (!(lo > 0.0) || !(lo < hi) || !(hi <= 1.05))
    throw std::invalid_argument("track_eigenvalue needs 0 < t_lo < t_hi <= 1.05");
  if (steps < 8)
    throw std::invalid_argument("track_eigenvalue requires steps >= 8");
  if (mode_index < 1)
    throw std::invalid_argument("track_eigenvalue mode_index is 1-based");
  const int N = 512;
  const int k = std::max(mode_index, std::min(std::max(mode_index + 4, 8), N / 4));
  return follow_branch(cfg, quad, lo, hi, steps, N, k, mode_index - 1);
}

SlopeComparison eigenvalue_slope_at_critical(double t0, const SlabConfig& cfg,
                                             const QuadratureSpec& quad, int N) {
  validate(cfg);
  validate(quad);
  if (!(t0 > 0.0) || !std::isfinite(t0))
    throw std::invalid_argument("eigenvalue_slope_at_critical needs t0 > 0");
  if (N < 128)
    throw std::invalid_argument(
        "eigenvalue_slope_at_critical requires at least 128 cells");

  const Estimate vp = enclosed_volume_slope(t0, cfg, quad);
  if (std::fabs(vp.value) > std::max(1e-5, 20.0 * vp.error))
    throw std::invalid_argument(
        "eigenvalue_slope_at_critical: the volume slope does not vanish at t0");
  const Estimate v2 = enclosed_volume_curvature(t0, cfg, quad);
  if (std::fabs(v2.value) <= 10.0 * v2.error)
    throw DegenerateCriticalError(
        "volume second derivative is not resolved above noise at the critical "
        "point");
  const Estimate eta1 = mean_curvature_slope(t0, cfg, quad);

  FamilyParam param;
  param.t = t0;
  const ProfileSamples samples = profile_samples(param, cfg, quad, N);
  const DiscretizedOperator op = assemble_operator(samples, cfg);
  const GridDerivative vt = profile_t_derivative_grid(t0, cfg, quad, N, 1e-3);
  const double denom =
      cfg.n * unit_ball_volume(cfg.n) * weighted_inner(op, vt.values, vt.values);

  SlopeComparison out;
  out.formula_value = -(v2.value * eta1.value) / denom;

  const double window = 1e-2;
  const auto branch = follow_branch(cfg, quad, t0 - window, t0 + window, 8, N, 8, -1);
  double mean_t = 0.0, mean_l = 0.0;
  for (const auto& node : branch) {
    mean_t += node.t;
    mean_l += node.lambda;
  }
  mean_t /= static_cast<double>(branch.size());
  mean_l /= static_cast<double>(branch.size());
  double stt = 0.0, stl = 0.0;
  for (const auto& node : branch) {
    stt += (node.t - mean_t) * (node.t - mean_t);
    stl += (node.t - mean_t) * (node.lambda - mean_l);
  }
  out.continuation_value = stl / stt;
  return out;
}

}  // namespace unduloid
