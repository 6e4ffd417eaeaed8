#include "doctest.h"

#include <cmath>
#include <random>

#include "mintime/drift.hpp"

using namespace mintime;

namespace {

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("linear drift evaluates A x and knows its operator norm") {
  Matrix a(2, 2);
  a << -4, 6, -4, 2;
  DriftField field = DriftField::linear(a);
  CHECK(field.is_linear());
  CHECK((field.eval(vec2(1, 0)) - vec2(-4, -4)).norm() <= 1e-15);
  CHECK((field.eval(vec2(0.5, -1.0)) - vec2(-8, -4)).norm() <= 1e-14);

  REQUIRE(field.lipschitz_constant().has_value());
  const double lip = *field.lipschitz_constant();
  CHECK(lip == doctest::Approx(a.jacobiSvd().singularValues()[0]).epsilon(1e-12));
  std::mt19937_64 rng(17);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    Vector x = vec2(gauss(rng), gauss(rng));
    Vector y = vec2(gauss(rng), gauss(rng));
    CHECK((field.eval(x) - field.eval(y)).norm() <= lip * (x - y).norm() * (1 + 1e-12) + 1e-15);
  }
}

TEST_CASE("constant drift ignores the state") {
  DriftField field = DriftField::constant(vec2(0.3, 0.2));
  CHECK((field.eval(vec2(100, -7)) - vec2(0.3, 0.2)).norm() == 0.0);
  CHECK((field.eval(Vector::Zero(2)) - vec2(0.3, 0.2)).norm() == 0.0);
  REQUIRE(field.lipschitz_constant().has_value());
  CHECK(*field.lipschitz_constant() == 0.0);
  CHECK(!field.is_linear());
}

TEST_CASE("inverse-square attraction points at the source with 1/r^2 magnitude") {
  Vector source = vec2(10, 4);
  DriftField field = DriftField::inverse_square_attraction(source);
  Vector x = vec2(-4, -1);
  Vector f = field.eval(x);
  const double dist = (source - x).norm();
  CHECK(f.norm() == doctest::Approx(1.0 / (dist * dist)).epsilon(1e-14));
  Vector direction = (source - x) / dist;
  CHECK((f / f.norm() - direction).norm() <= 1e-14);
  CHECK(!field.lipschitz_constant().has_value());
  CHECK_THROWS_AS(field.eval(source), SingularPoint);
}

TEST_CASE("axis-weighted attraction scales by axis alignment") {
  Vector source = vec2(10, 4);
  DriftField field = DriftField::axis_weighted_attraction(source, vec2(1, 0));
  Vector x = vec2(0, 0);
  Vector d = source - x;
  Vector expected = d[0] * d / (d.squaredNorm() * d.squaredNorm());
  CHECK((field.eval(x) - expected).norm() <= 1e-15);
  // Points level with the source along the axis feel no pull.
  Vector level = vec2(10, -3);
  CHECK(field.eval(level).norm() == 0.0);
  CHECK_THROWS_AS(field.eval(source), SingularPoint);
  CHECK_THROWS_AS(DriftField::axis_weighted_attraction(source, Vector::Zero(2)), Error);
}

TEST_CASE("counterexample rails carry the ramp profiles") {
  DriftField field = DriftField::piecewise_counterexample();
  CHECK(field.dimension() == 3);
  // Top rail (a, 0, 1): +x1 flow for a <= 0, ramp to -1 over [0, 1/2].
  CHECK((field.eval(vec3(-0.7, 0, 1)) - vec3(1, 0, 0)).norm() <= 1e-15);
  CHECK(field.eval(vec3(0.25, 0, 1)).norm() <= 1e-15);  // ramp zero crossing
  CHECK((field.eval(vec3(0.9, 0, 1)) - vec3(-1, 0, 0)).norm() <= 1e-15);
  // Bottom rail (b, 0, 0): -x1 flow for b <= -1/2, ramp to +1 at 0.
  CHECK((field.eval(vec3(-0.7, 0, 0)) - vec3(-1, 0, 0)).norm() <= 1e-15);
  CHECK((field.eval(vec3(0.6, 0, 0)) - vec3(1, 0, 0)).norm() <= 1e-15);
  CHECK((field.eval(vec3(-0.25, 0, 0)) - vec3(0, 0, 0)).norm() <= 1e-15);
}

TEST_CASE("counterexample tubes are disjoint and blend into upward flow") {
  DriftField field = DriftField::piecewise_counterexample();
  // Midpoint between the rails is outside both tubes.
  CHECK((field.eval(vec3(0, 0, 0.5)) - vec3(0, 1, 0)).norm() <= 1e-15);
  // Far from everything: pure upward flow.
  CHECK((field.eval(vec3(0, 1.5, 0.5)) - vec3(0, 1, 0)).norm() <= 1e-15);
  // Rail influence fades past |x1| = 1.25.
  CHECK((field.eval(vec3(1.5, 0, 1)) - vec3(0, 1, 0)).norm() <= 1e-15);
  // Halfway into the top tube: half rail flow, half upward.
  CHECK((field.eval(vec3(-0.5, 0.125, 1)) - vec3(0.5, 0.5, 0)).norm() <= 1e-12);
}

TEST_CASE("counterexample second coordinate never decreases") {
  DriftField field = DriftField::piecewise_counterexample();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  for (int trial = 0; trial < 2000; ++trial) {
    Vector x = vec3(coord(rng), coord(rng), coord(rng));
    Vector f = field.eval(x);
    CHECK(f[1] >= 0.0);
    CHECK(f[2] == 0.0);
    CHECK(std::abs(f[0]) <= 1.0 + 1e-15);
  }
}

TEST_CASE("projected evaluation applies the basis projection") {
  Matrix a(2, 2);
  a << -4, 6, -4, 2;
  DriftField field = DriftField::linear(a);
  Basis slow = orthonormalize(std::vector<Vector>{vec2(-1, 1)});
  Vector x = vec2(1, 0);
  Vector expected = project(field.eval(x), slow);
  CHECK((field.eval_projected(x, slow) - expected).norm() <= 1e-15);
}

TEST_CASE("empirical lipschitz estimate brackets the linear closed form") {
  ConvexBody box = ConvexBody::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  Matrix a(2, 2);
  a << -4, 6, -4, 2;
  DriftField linear = DriftField::linear(a);
  // Closed form short-circuits the sampling path.
  CHECK(estimate_lipschitz(linear, box) == *linear.lipschitz_constant());

  DriftField attraction = DriftField::inverse_square_attraction(vec2(10, 4));
  const double estimate = estimate_lipschitz(attraction, box, 4096, 0);
  CHECK(estimate > 0.0);
  CHECK(estimate < 1.0);  // the field is gentle this far from the source
  CHECK(estimate == estimate_lipschitz(attraction, box, 4096, 0));  // seeded determinism
}

TEST_CASE("max speed estimate is exact for constant fields and bounded for linear") {
  ConvexBody box = ConvexBody::box(Vector::Constant(2, -1.0), Vector::Constant(2, 1.0));
  DriftField constant = DriftField::constant(vec2(0.3, -0.4));
  CHECK(estimate_max_speed(constant, box) == doctest::Approx(0.5).epsilon(1e-14));

  Matrix a(2, 2);
  a << -4, 6, -4, 2;
  DriftField linear = DriftField::linear(a);
  const double speed = estimate_max_speed(linear, box);
  const double upper = *linear.lipschitz_constant() * box.bounding_radius();
  CHECK(speed > 0.0);
  CHECK(speed <= upper * (1 + 1e-12));
  // Box vertices are landmarks, so the corner speed is always reached.
  double corner_best = 0.0;
  for (const auto& v : box.vertices()) corner_best = std::max(corner_best, (a * v).norm());
  CHECK(speed >= corner_best - 1e-12);
}

TEST_CASE("dimension mismatches are rejected") {
  Matrix a(2, 2);
  a << 1, 0, 0, 1;
  DriftField field = DriftField::linear(a);
  CHECK_THROWS_AS(field.eval(Vector::Zero(3)), Error);
  CHECK_THROWS_AS(DriftField::linear(Matrix::Zero(2, 3)), Error);
  CHECK_THROWS_AS(DriftField::constant(Vector()), Error);
}
