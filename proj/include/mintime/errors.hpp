#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mintime {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Slice anchor fails body membership by more than the membership tolerance.
class AnchorOutside : public Error {
 public:
  using Error::Error;
};

// Affine slice has no point inside the body.
class EmptySlice : public Error {
 public:
  using Error::Error;
};

// Field evaluated at (or too close to) a singular point.
class SingularPoint : public Error {
 public:
  using Error::Error;
};

// Operation requires dim H == 1 but the system has more slow directions.
class NotCodimOne : public Error {
 public:
  using Error::Error;
};

// Endpoint is not an interior point of the constraint body.
class NotInterior : public Error {
 public:
  using Error::Error;
};

// Reciprocal-rate integrand hit a non-positive rate.
class NonPositiveRate : public Error {
 public:
  using Error::Error;
};

class SynthesisInfeasible : public Error {
 public:
  using Error::Error;
};

class NoFeasibleRun : public Error {
 public:
  using Error::Error;
};

// Integrator state left the sanity radius; dt is too coarse for the dynamics.
class StepBlowup : public Error {
 public:
  using Error::Error;
};

// Non-convex constraint set passed to an operation whose guarantees need convexity.
class NonConvexBody : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// Scenario validation failure; carries the offending field path.
class ValidationError : public Error {
 public:
  ValidationError(std::string field_path, const std::string& message)
      : Error(field_path + ": " + message), field_path_(std::move(field_path)) {}

  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

}  // namespace mintime
