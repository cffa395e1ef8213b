#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace unduloid {

// Problem instance: profiles live over the axis segment [0, d] and the
// ambient space is an (n+1)-dimensional slab.
struct SlabConfig {
  int n = 8;             // ambient-minus-one dimension, >= 2
  double d = 1.0;        // slab width, > 0
  double t_floor = 1e-3; // smallest admissible neck parameter for
                         // quadrature-backed evaluations (configurable)
};

void validate(const SlabConfig& cfg);

// Family coordinate.  t = 1 is the cylinder; t -> 1/t is the reflection of
// the profile.  r is only used by the two-parameter profile evaluation.
struct FamilyParam {
  double t = 1.0;
  std::optional<double> r;
};

// A value together with an a-posteriori error estimate.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

// ===== error hierarchy =====
//
// NumericsError covers runtime numerical failures (exit code 3 in the CLI);
// precondition violations throw std::invalid_argument (exit code 2).

class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureNonConvergence : public NumericsError {
 public:
  QuadratureNonConvergence(const std::string& what, double best, double err)
      : NumericsError(what), best_value(best), error_estimate(err) {}
  double best_value;
  double error_estimate;
};

class RootBracketError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

class StepError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

class NoisySignalError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

class BranchLossError : public NumericsError {
 public:
  BranchLossError(const std::string& what, double overlap)
      : NumericsError(what), best_overlap(overlap) {}
  double best_overlap;
};

class DegenerateCriticalError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

class EigensolveError : public NumericsError {
 public:
  using NumericsError::NumericsError;
};

}  // namespace unduloid
