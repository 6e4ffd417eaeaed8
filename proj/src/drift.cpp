#include "mintime/drift.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mintime {

namespace {

// 1 for a <= 0, ramps to -1 over [0, 1/2].
double top_rail_profile(double a) {
  if (a <= 0.0) return 1.0;
  if (a >= 0.5) return -1.0;
  return 1.0 - 4.0 * a;
}

// -1 for b <= -1/2, ramps to 1 over [-1/2, 0].
double bottom_rail_profile(double b) {
  if (b >= 0.0) return 1.0;
  if (b <= -0.5) return -1.0;
  return 4.0 * b + 1.0;
}

// 1 on |x1| <= 1, tapers linearly to 0 at |x1| = 1.25.
double rail_cap(double x1) { return std::clamp(1.0 - 4.0 * (std::abs(x1) - 1.0), 0.0, 1.0); }

// Tent weight of tube radius 1/4 around distance d from a rail axis.
double tube_weight(double d) { return std::max(0.0, 1.0 - 4.0 * d); }

}  // namespace

Vector counterexample_field(const Vector& x) {
  if (x.size() != 3) throw Error("counterexample_field: expects a 3-vector");
  const double cap = rail_cap(x[0]);
  const double w_top = tube_weight(std::hypot(x[1], x[2] - 1.0)) * cap;
  const double w_bottom = tube_weight(std::hypot(x[1], x[2])) * cap;
  // Tube supports are disjoint (|x3 - 1| and |x3| cannot both be < 1/4), so
  // w_top + w_bottom <= 1 with equality exactly on the two rails.
  Vector f(3);
  f[0] = w_top * top_rail_profile(x[0]) + w_bottom * bottom_rail_profile(x[0]);
  f[1] = 1.0 - w_top - w_bottom;
  f[2] = 0.0;
  return f;
}

DriftField DriftField::linear(Matrix a) {
  if (a.rows() == 0 || a.rows() != a.cols()) throw Error("linear drift: matrix must be square");
  const Eigen::Index n = a.rows();
  const double opnorm = a.jacobiSvd().singularValues()[0];
  return DriftField(Linear{std::move(a)}, n, opnorm);
}

DriftField DriftField::constant(Vector value) {
  if (value.size() == 0) throw Error("constant drift: empty value");
  const Eigen::Index n = value.size();
  return DriftField(Constant{std::move(value)}, n, 0.0);
}

DriftField DriftField::inverse_square_attraction(Vector source) {
  if (source.size() == 0) throw Error("attraction drift: empty source");
  const Eigen::Index n = source.size();
  return DriftField(Attraction{std::move(source)}, n, std::nullopt);
}

DriftField DriftField::axis_weighted_attraction(Vector source, Vector axis) {
  if (source.size() == 0 || source.size() != axis.size())
    throw Error("axis-weighted drift: source/axis dimension mismatch");
  if (axis.norm() < 1e-14) throw Error("axis-weighted drift: zero axis");
  const Eigen::Index n = source.size();
  return DriftField(AxisAttraction{std::move(source), std::move(axis)}, n, std::nullopt);
}

DriftField DriftField::piecewise_counterexample() {
  return DriftField(Counterexample{}, 3, std::nullopt);
}

Vector DriftField::eval(const Vector& x) const {
  if (x.size() != dim_) throw Error("drift eval: point dimension mismatch");
  if (const auto* lin = std::get_if<Linear>(&shape_)) return lin->a * x;
  if (const auto* con = std::get_if<Constant>(&shape_)) return con->value;
  if (const auto* att = std::get_if<Attraction>(&shape_)) {
    const Vector d = att->source - x;
    const double dist = d.norm();
    if (dist < 1e-12) throw SingularPoint("attraction drift evaluated at its source");
    return d / (dist * dist * dist);
  }
  if (const auto* axa = std::get_if<AxisAttraction>(&shape_)) {
    const Vector d = axa->source - x;
    const double dist2 = d.squaredNorm();
    if (dist2 < 1e-24) throw SingularPoint("attraction drift evaluated at its source");
    return axa->axis.dot(d) * d / (dist2 * dist2);
  }
  return counterexample_field(x);
}

Vector DriftField::eval_projected(const Vector& x, const Basis& onto) const {
  return project(eval(x), onto);
}

bool DriftField::is_linear() const { return std::holds_alternative<Linear>(shape_); }

const Matrix& DriftField::linear_matrix() const {
  if (const auto* lin = std::get_if<Linear>(&shape_)) return lin->a;
  throw Error("linear_matrix: drift is not linear");
}

namespace {

Vector random_box_point(const ConvexBody& body, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double r = body.bounding_radius();
  Vector x(body.dimension());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = r * unit(rng);
  return x;
}

}  // namespace

double estimate_lipschitz(const DriftField& field, const ConvexBody& body, int pairs,
                          unsigned seed) {
  if (auto exact = field.lipschitz_constant()) return *exact;
  std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ull);
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const Vector x = random_box_point(body, rng);
    const Vector y = random_box_point(body, rng);
    const double dist = (x - y).norm();
    if (dist < 1e-9) continue;
    try {
      worst = std::max(worst, (field.eval(x) - field.eval(y)).norm() / dist);
    } catch (const SingularPoint&) {
      continue;  // attraction source inside the sampling box
    }
  }
  return 1.5 * worst;
}

double estimate_max_speed(const DriftField& field, const ConvexBody& body, int samples,
                          unsigned seed) {
  std::mt19937_64 rng(seed ^ 0xa0761d6478bd642full);
  double best = 0.0;
  auto consider = [&](const Vector& x) {
    if (!body.contains(x, 1e-9)) return;
    try {
      best = std::max(best, field.eval(x).norm());
    } catch (const SingularPoint&) {
    }
  };
  consider(body.interior_point());
  for (const auto& v : body.vertices()) consider(v);
  for (int k = 0; k < samples; ++k) consider(random_box_point(body, rng));
  return best;
}

}  // namespace mintime
