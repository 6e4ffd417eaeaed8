#pragma once

#include <Eigen/Dense>

#include <utility>
#include <variant>
#include <vector>

#include "mintime/errors.hpp"

namespace mintime {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Absolute tolerance on defining-inequality residuals, uniform across body kinds.
inline constexpr double kMembershipTol = 1e-10;

// Orthonormal basis of a subspace; columns of `vectors`.
struct Basis {
  Matrix vectors;  // ambient x dim, orthonormal columns

  Eigen::Index dimension() const { return vectors.cols(); }
  Eigen::Index ambient_dimension() const { return vectors.rows(); }
  Vector column(Eigen::Index i) const { return vectors.col(i); }
};

// Modified Gram-Schmidt with re-orthogonalization pass. Inputs whose norm drops
// below drop_tol after deflation are dropped, so the result can have fewer
// columns than the input.
Basis orthonormalize(const Matrix& columns, double drop_tol = 1e-10);
Basis orthonormalize(const std::vector<Vector>& vectors, double drop_tol = 1e-10);

// Orthonormal basis of span(range)^perp in the ambient space.
Basis complement_basis(const Basis& range);

// Orthogonal projection of y onto span(basis).
Vector project(const Vector& y, const Basis& basis);

struct BoxShape {
  Vector lower;
  Vector upper;
};

// (x - center)' shape (x - center) <= 1, shape positive definite.
struct EllipsoidShape {
  Vector center;
  Matrix shape;
};

// normals * x <= offsets, one row per halfspace; must describe a bounded set.
struct PolytopeShape {
  Matrix normals;
  Vector offsets;
};

class ConvexBody {
 public:
  static ConvexBody box(Vector lower, Vector upper);
  static ConvexBody ellipsoid(Vector center, Matrix shape);
  static ConvexBody polytope(Matrix normals, Vector offsets);

  Eigen::Index dimension() const { return dim_; }
  double bounding_radius() const { return bounding_radius_; }

  // Largest defining-inequality residual; <= 0 inside. The ellipsoid residual is
  // quadratic, so margins are not comparable across kinds.
  double margin(const Vector& x) const;
  bool contains(const Vector& x, double tol = kMembershipTol) const;

  // Membership of x and of the 2n axis probes x +- radius e_i.
  bool contains_ball(const Vector& x, double radius) const;

  // A strictly interior point (box/ellipsoid center, polytope vertex centroid).
  Vector interior_point() const;

  const std::variant<BoxShape, EllipsoidShape, PolytopeShape>& shape() const { return shape_; }
  bool is_box() const { return std::holds_alternative<BoxShape>(shape_); }
  bool is_ellipsoid() const { return std::holds_alternative<EllipsoidShape>(shape_); }
  bool is_polytope() const { return std::holds_alternative<PolytopeShape>(shape_); }

  // Halfspace rows for box/polytope kinds; throws Error for ellipsoids.
  void halfspaces(Matrix& normals, Vector& offsets) const;

  // Exact vertex set for box/polytope kinds (dimension is small); empty for ellipsoids.
  const std::vector<Vector>& vertices() const { return vertices_; }

 private:
  ConvexBody(std::variant<BoxShape, EllipsoidShape, PolytopeShape> shape, Eigen::Index dim);

  std::variant<BoxShape, EllipsoidShape, PolytopeShape> shape_;
  Eigen::Index dim_ = 0;
  double bounding_radius_ = 0;
  std::vector<Vector> vertices_;
};

// Vertices of {x : normals x <= offsets} by enumerating active sets.
// Intended for small dimensions; throws Error if the set has no vertex.
std::vector<Vector> enumerate_vertices(const Matrix& normals, const Vector& offsets);

// Affine slice anchor + span(directions); membership always against a body.
struct Slice {
  Vector anchor;
  Basis directions;
};

// Chord of the slice inside the body through the anchor, along `direction`
// given in slice coordinates. Bisection on membership to absolute tolerance
// 1e-10; returns (t_min, t_max) with t_min <= 0 <= t_max.
std::pair<double, double> slice_extent(const ConvexBody& body, const Slice& slice,
                                       const Vector& direction);

}  // namespace mintime
