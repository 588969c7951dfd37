#pragma once

#include <stdexcept>
#include <string>

namespace hflow {

/// Adaptive quadrature ran out of refinement budget before reaching tolerance.
struct QuadratureNonconvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No finite comparison constant validates the kernel bounds (table build bug).
struct ComparisonFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No exponent a > 0 makes r^a m(r) non-increasing (cutoff scale too large).
struct NoValidExponent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Doubling search for the modulus slope parameter exceeded its cap.
struct SearchExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Extremal-profile construction could not restore obedience.
struct ConstructionFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A time step produced non-finite values even after dt reduction.
struct StepRejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hflow
