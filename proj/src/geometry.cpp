#include "mintime/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mintime {

namespace {

// One MGS sweep; re-run on the survivors to push orthogonality to ~1e-15.
Matrix gram_schmidt(const Matrix& columns, double drop_tol, bool drop) {
  const Eigen::Index n = columns.rows();
  Matrix kept(n, columns.cols());
  Eigen::Index count = 0;
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    Vector v = columns.col(j);
    for (Eigen::Index i = 0; i < count; ++i) v -= kept.col(i).dot(v) * kept.col(i);
    const double norm = v.norm();
    if (norm < drop_tol) {
      if (drop) continue;
      throw Error("orthonormalize: column collapsed during re-orthogonalization");
    }
    kept.col(count++) = v / norm;
  }
  return kept.leftCols(count);
}

}  // namespace

Basis orthonormalize(const Matrix& columns, double drop_tol) {
  if (columns.rows() == 0) throw Error("orthonormalize: empty ambient dimension");
  Matrix once = gram_schmidt(columns, drop_tol, true);
  if (once.cols() == 0) return Basis{Matrix(columns.rows(), 0)};
  return Basis{gram_schmidt(once, 0.5, false)};
}

Basis orthonormalize(const std::vector<Vector>& vectors, double drop_tol) {
  if (vectors.empty()) throw Error("orthonormalize: no input vectors");
  Matrix columns(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    if (vectors[j].size() != columns.rows())
      throw Error("orthonormalize: inconsistent vector dimensions");
    columns.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  return orthonormalize(columns, drop_tol);
}

Basis complement_basis(const Basis& range) {
  const Eigen::Index n = range.ambient_dimension();
  Matrix stacked(n, range.dimension() + n);
  stacked.leftCols(range.dimension()) = range.vectors;
  stacked.rightCols(n) = Matrix::Identity(n, n);
  Basis full = orthonormalize(stacked);
  if (full.dimension() != n) throw Error("complement_basis: range basis is rank deficient");
  return Basis{full.vectors.rightCols(n - range.dimension())};
}

Vector project(const Vector& y, const Basis& basis) {
  if (basis.dimension() == 0) return Vector::Zero(y.size());
  return basis.vectors * (basis.vectors.transpose() * y);
}

ConvexBody::ConvexBody(std::variant<BoxShape, EllipsoidShape, PolytopeShape> shape,
                       Eigen::Index dim)
    : shape_(std::move(shape)), dim_(dim) {}

ConvexBody ConvexBody::box(Vector lower, Vector upper) {
  if (lower.size() == 0 || lower.size() != upper.size())
    throw Error("box: lower/upper dimension mismatch");
  if (((upper - lower).array() <= 0).any()) throw Error("box: requires lower < upper per axis");
  const Eigen::Index n = lower.size();
  ConvexBody body(BoxShape{std::move(lower), std::move(upper)}, n);
  const auto& b = std::get<BoxShape>(body.shape_);
  body.bounding_radius_ = b.lower.cwiseAbs().cwiseMax(b.upper.cwiseAbs()).norm();
  body.vertices_.reserve(static_cast<std::size_t>(1) << n);
  for (std::size_t mask = 0; mask < (static_cast<std::size_t>(1) << n); ++mask) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? b.upper[i] : b.lower[i];
    body.vertices_.push_back(std::move(v));
  }
  return body;
}

ConvexBody ConvexBody::ellipsoid(Vector center, Matrix shape) {
  const Eigen::Index n = center.size();
  if (n == 0 || shape.rows() != n || shape.cols() != n)
    throw Error("ellipsoid: center/shape dimension mismatch");
  if ((shape - shape.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1 + shape.cwiseAbs().maxCoeff()))
    throw Error("ellipsoid: shape matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(shape);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0)
    throw Error("ellipsoid: shape matrix must be positive definite");
  ConvexBody body(EllipsoidShape{std::move(center), std::move(shape)}, n);
  const auto& e = std::get<EllipsoidShape>(body.shape_);
  body.bounding_radius_ = e.center.norm() + 1.0 / std::sqrt(eig.eigenvalues().minCoeff());
  return body;
}

std::vector<Vector> enumerate_vertices(const Matrix& normals, const Vector& offsets) {
  const Eigen::Index n = normals.cols();
  const Eigen::Index p = normals.rows();
  if (p < n + 1) throw Error("polytope: too few halfspaces to bound a set");
  const double scale = 1.0 + offsets.cwiseAbs().maxCoeff();
  std::vector<Vector> vertices;
  std::vector<Eigen::Index> pick(n);
  // Active-set enumeration over all n-subsets of rows; p and n stay small here.
  auto recurse = [&](auto&& self, Eigen::Index depth, Eigen::Index first) -> void {
    if (depth == n) {
      Matrix a(n, n);
      Vector rhs(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        a.row(i) = normals.row(pick[i]);
        rhs[i] = offsets[pick[i]];
      }
      Eigen::FullPivLU<Matrix> lu(a);
      if (!lu.isInvertible()) return;
      Vector x = lu.solve(rhs);
      if (((normals * x - offsets).array() > 1e-9 * scale).any()) return;
      for (const auto& known : vertices)
        if ((known - x).norm() < 1e-9 * scale) return;
      vertices.push_back(std::move(x));
      return;
    }
    for (Eigen::Index row = first; row <= p - (n - depth); ++row) {
      pick[depth] = row;
      self(self, depth + 1, row + 1);
    }
  };
  recurse(recurse, 0, 0);
  if (vertices.empty()) throw Error("polytope: no vertex found (empty or degenerate set)");
  return vertices;
}

ConvexBody ConvexBody::polytope(Matrix normals, Vector offsets) {
  const Eigen::Index n = normals.cols();
  if (n == 0 || normals.rows() != offsets.size())
    throw Error("polytope: normals/offsets dimension mismatch");
  ConvexBody body(PolytopeShape{std::move(normals), std::move(offsets)}, n);
  const auto& poly = std::get<PolytopeShape>(body.shape_);
  body.vertices_ = enumerate_vertices(poly.normals, poly.offsets);
  double radius = 0;
  for (const auto& v : body.vertices_) radius = std::max(radius, v.norm());
  body.bounding_radius_ = radius;
  // Sampled recession check: a direction no halfspace cuts off means unbounded.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 4096 + 2 * static_cast<int>(n); ++trial) {
    Vector d(n);
    if (trial < 2 * n) {
      d.setZero();
      d[trial / 2] = trial % 2 ? -1.0 : 1.0;
    } else {
      for (Eigen::Index i = 0; i < n; ++i) d[i] = gauss(rng);
      if (d.norm() < 1e-8) continue;
      d.normalize();
    }
    if (((poly.normals * d).array() <= 1e-10).all())
      throw Error("polytope: unbounded (recession direction found)");
  }
  return body;
}

double ConvexBody::margin(const Vector& x) const {
  if (x.size() != dim_) throw Error("margin: point dimension mismatch");
  if (const auto* b = std::get_if<BoxShape>(&shape_))
    return std::max((b->lower - x).maxCoeff(), (x - b->upper).maxCoeff());
  if (const auto* e = std::get_if<EllipsoidShape>(&shape_)) {
    Vector d = x - e->center;
    return d.dot(e->shape * d) - 1.0;
  }
  const auto& p = std::get<PolytopeShape>(shape_);
  return (p.normals * x - p.offsets).maxCoeff();
}

bool ConvexBody::contains(const Vector& x, double tol) const { return margin(x) <= tol; }

bool ConvexBody::contains_ball(const Vector& x, double radius) const {
  if (!contains(x)) return false;
  for (Eigen::Index i = 0; i < dim_; ++i) {
    Vector probe = x;
    probe[i] = x[i] + radius;
    if (!contains(probe)) return false;
    probe[i] = x[i] - radius;
    if (!contains(probe)) return false;
  }
  return true;
}

Vector ConvexBody::interior_point() const {
  if (const auto* b = std::get_if<BoxShape>(&shape_)) return 0.5 * (b->lower + b->upper);
  if (const auto* e = std::get_if<EllipsoidShape>(&shape_)) return e->center;
  Vector sum = Vector::Zero(dim_);
  for (const auto& v : vertices_) sum += v;
  return sum / static_cast<double>(vertices_.size());
}

void ConvexBody::halfspaces(Matrix& normals, Vector& offsets) const {
  if (const auto* b = std::get_if<BoxShape>(&shape_)) {
    normals.setZero(2 * dim_, dim_);
    offsets.resize(2 * dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) {
      normals(2 * i, i) = 1.0;
      offsets[2 * i] = b->upper[i];
      normals(2 * i + 1, i) = -1.0;
      offsets[2 * i + 1] = -b->lower[i];
    }
    return;
  }
  if (const auto* p = std::get_if<PolytopeShape>(&shape_)) {
    normals = p->normals;
    offsets = p->offsets;
    return;
  }
  throw Error("halfspaces: ellipsoid has no halfspace description");
}

std::pair<double, double> slice_extent(const ConvexBody& body, const Slice& slice,
                                       const Vector& direction) {
  if (slice.directions.dimension() == 0) throw Error("slice_extent: slice has no directions");
  if (direction.size() != slice.directions.dimension())
    throw Error("slice_extent: direction must be in slice coordinates");
  const double dnorm = direction.norm();
  if (dnorm < 1e-14) throw Error("slice_extent: zero direction");
  if (!body.contains(slice.anchor)) throw AnchorOutside("slice_extent: anchor fails membership");

  const Vector step = slice.directions.vectors * (direction / dnorm);
  auto inside = [&](double t) { return body.contains(slice.anchor + t * step); };
  // Any chord point satisfies |t| <= |anchor| + bounding radius.
  const double reach = slice.anchor.norm() + body.bounding_radius() + 1.0;

  auto boundary = [&](double sign) {
    double lo = 0.0, hi = sign * reach;
    if (inside(hi)) return hi;  // unreachable for a bounded body, kept as a guard
    while (std::abs(hi - lo) > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      (inside(mid) ? lo : hi) = mid;
    }
    return lo;
  };

  return {boundary(-1.0), boundary(+1.0)};
}

}  // namespace mintime
