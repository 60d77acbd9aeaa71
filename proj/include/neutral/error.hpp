#pragma once

#include <stdexcept>
#include <string>

namespace neutral {

// Input or precondition violated. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid curve or inclusion: self-intersection, containment failure,
// non-univalent Laurent map.
class GeometryError : public ValidationError {
 public:
  GeometryError(const std::string& what, double parameter = -1.0)
      : ValidationError(what), parameter_(parameter) {}

  // Curve parameter t (or annulus angle) of the first detected defect, or -1.
  double parameter() const { return parameter_; }

 private:
  double parameter_;
};

// Target point closer to a source curve than the configured near-zone
// distance; plain trapezoid evaluation would be inaccurate there.
class NearZoneError : public ValidationError {
 public:
  NearZoneError(const std::string& what, double distance, double limit)
      : ValidationError(what), distance_(distance), limit_(limit) {}
  double distance() const { return distance_; }
  double limit() const { return limit_; }

 private:
  double distance_;
  double limit_;
};

class DegenerateContrastError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NoValidCoatingError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnsupportedConfigurationError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Numerical failure: singular discrete system, non-convergence.
// Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public NumericalError {
 public:
  SolverError(const std::string& what, double rcond)
      : NumericalError(what), rcond_(rcond) {}
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

}  // namespace neutral
