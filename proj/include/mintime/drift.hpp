#pragma once

#include <optional>
#include <variant>

#include "mintime/geometry.hpp"

namespace mintime {

// Frozen 3-D field used by the dim H = 2 gap demonstration. Two guide rails,
// {(a,0,1): a in [-1,1]} and {(b,0,0): b in [-1,1]}, carry pure +-x1 flow
// (ramping 1 -> -1 over a in [0,1/2] on the top rail, -1 -> 1 over b in
// [-1/2,0] on the bottom rail); away from the rails the field blends into
// (0,1,0) over tube radius 1/4, so the second coordinate can only grow.
Vector counterexample_field(const Vector& x);

class DriftField {
 public:
  // F(x) = A x.
  static DriftField linear(Matrix a);
  // F(x) = value everywhere.
  static DriftField constant(Vector value);
  // F(x) = (S - x) / (|S - x| * |S - x|^2).
  static DriftField inverse_square_attraction(Vector source);
  // F(x) = <axis, S - x> (S - x) / |S - x|^4; unit-magnitude attraction weighted
  // by alignment with a fixed axis.
  static DriftField axis_weighted_attraction(Vector source, Vector axis);
  // The frozen counterexample_field above.
  static DriftField piecewise_counterexample();

  Vector eval(const Vector& x) const;
  Vector eval_projected(const Vector& x, const Basis& onto) const;

  Eigen::Index dimension() const { return dim_; }

  // Closed form for the linear kind (largest singular value); nullopt otherwise.
  std::optional<double> lipschitz_constant() const { return lipschitz_; }

  bool is_linear() const;
  const Matrix& linear_matrix() const;

 private:
  struct Linear {
    Matrix a;
  };
  struct Constant {
    Vector value;
  };
  struct Attraction {
    Vector source;
  };
  struct AxisAttraction {
    Vector source;
    Vector axis;
  };
  struct Counterexample {};

  template <typename Shape>
  DriftField(Shape shape, Eigen::Index dim, std::optional<double> lipschitz)
      : shape_(std::move(shape)), dim_(dim), lipschitz_(lipschitz) {}

  std::variant<Linear, Constant, Attraction, AxisAttraction, Counterexample> shape_;
  Eigen::Index dim_ = 0;
  std::optional<double> lipschitz_;
};

// Seeded empirical Lipschitz estimate over random pairs in the body's bounding
// box, inflated by 1.5. Used when no closed form exists.
double estimate_lipschitz(const DriftField& field, const ConvexBody& body, int pairs = 4096,
                          unsigned seed = 0);

// Max |F| over the body, estimated on seeded random member points plus the
// body's own landmarks. Feeds synthesis gain and step-size defaults.
double estimate_max_speed(const DriftField& field, const ConvexBody& body, int samples = 4096,
                          unsigned seed = 0);

}  // namespace mintime
