#pragma once

#include <functional>

#include "unduloid/types.hpp"

namespace unduloid {

enum class QuadMethod {
  DoubleExponential,  // tanh-sinh, level-doubling
  SubstitutedGauss,   // x = a + (b-a) sin^2(theta), Gauss-Legendre in theta
};

struct QuadratureSpec {
  QuadMethod method = QuadMethod::DoubleExponential;
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_level = 12;
};

void validate(const QuadratureSpec& spec);

struct IntegralResult {
  double value = 0.0;
  double error_estimate = 0.0;
  long evaluations = 0;
};

// Integrands are evaluated strictly inside (a, b) and receive, besides the
// abscissa, its distances to both endpoints computed without cancellation.
// Integrands with inverse-square-root endpoint behaviour must use the
// distances; the raw abscissa loses all precision next to an endpoint.
using Integrand = std::function<double(double x, double dist_a, double dist_b)>;

IntegralResult integrate(const Integrand& f, double a, double b,
                         const QuadratureSpec& spec);

struct CrossCheck {
  IntegralResult first;
  IntegralResult second;
  double agreement;  // relative disagreement of the two values
};

// Evaluates the same integral with two different methods; used as the
// dual-scheme oracle harness throughout the test suite.
CrossCheck cross_check(const Integrand& f, double a, double b,
                       const QuadratureSpec& spec_a, const QuadratureSpec& spec_b);

}  // namespace unduloid
