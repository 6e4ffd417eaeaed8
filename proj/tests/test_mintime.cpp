#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "mintime/mintime.hpp"
#include "mintime/scenario.hpp"

using namespace mintime;

namespace {

constexpr double kRoot2 = 1.4142135623730951;

// Closed forms frozen from high-precision quadrature of the fixture fields.
constexpr double kDiagonalTime = 0.70235947810852509;        // 0.3 + ln(5)/4
constexpr double kAxisPullTime = 843.82090187234827343;      // disc, axis-weighted pull
constexpr double kAxisBranchLeft = 182.90870077319452801;    // arc [0, 1]
constexpr double kAxisBranchMiddle = 618.0;                  // arc [1, 7], (13^3 - 7^3)/3
constexpr double kAxisBranchRight = 42.912201099153745422;   // arc [7, 8]
constexpr double kPlainPullTime = 843.53038316713444297;     // unweighted inverse-square pull
constexpr double kEllipsoidTime = 0.14439129159768191;

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

ControlSystem diagonal_flow_system() {
  Matrix b(2, 1);
  b << 1, 1;
  Matrix a(2, 2);
  a << -4, 6, -4, 2;
  return ControlSystem(std::move(b), DriftField::linear(std::move(a)));
}

ConvexBody unit_box2(double half = 1.0) {
  return ConvexBody::box(Vector::Constant(2, -half), Vector::Constant(2, half));
}

std::string scenario_path(const char* name) {
  return std::string(MINTIME_SOURCE_DIR) + "/scenarios/" + name;
}

double hitting_time_rk4(const std::function<double(double)>& g, double m, double dt) {
  double y = 0.0, t = 0.0;
  while (y < m) {
    const double k1 = g(y);
    const double k2 = g(y + 0.5 * dt * k1);
    const double k3 = g(y + 0.5 * dt * k2);
    const double k4 = g(y + dt * k3);
    const double y_next = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (y_next >= m) {
      // Linear interpolation across the crossing step.
      return t + dt * (m - y) / (y_next - y);
    }
    y = y_next;
    t += dt;
    if (t > 1e6) throw Error("hitting_time_rk4: runaway integration");
  }
  return t;
}

}  // namespace

TEST_CASE("diagonal flow time matches the logarithmic closed form") {
  ControlSystem sys = diagonal_flow_system();
  ConvexBody box = unit_box2();
  TimeResult result = min_time_codim1(sys, box, vec2(0.7, -0.5), vec2(-0.5, 0.3));
  REQUIRE(result.status == ReachStatus::Finite);
  CHECK(result.time == doctest::Approx(kDiagonalTime).epsilon(1e-9));
  CHECK(result.time == doctest::Approx(0.3 + 0.25 * std::log(5.0)).epsilon(1e-9));
  CHECK(result.arc_length == doctest::Approx(kRoot2).epsilon(1e-12));
  CHECK(result.min_rate_found == doctest::Approx(0.2 * 2.0 * kRoot2).epsilon(1e-7));
  CHECK(result.argmin_arc_position == doctest::Approx(kRoot2).epsilon(1e-6));
  CHECK(std::abs(result.rate_sign_tol - 2.0 * kRoot2 * 1e-9) <= 1e-12);
  CHECK(result.quadrature_error_estimate <= 1e-6);
}

TEST_CASE("trichotomy statuses are attained and mutually exclusive") {
  ControlSystem sys = diagonal_flow_system();
  ConvexBody box = unit_box2();

  TimeResult finite = min_time_codim1(sys, box, vec2(0.7, -0.5), vec2(-0.5, 0.3));
  CHECK(finite.status == ReachStatus::Finite);
  CHECK(std::isfinite(finite.time));

  // The slow coordinate must cross a negative-rate stretch: obstruction.
  TimeResult blocked = min_time_codim1(sys, box, vec2(0.7, -0.5), vec2(-0.6, 0.6));
  CHECK(blocked.status == ReachStatus::Unreachable);
  CHECK(std::isnan(blocked.time));
  CHECK(blocked.min_rate_found == doctest::Approx(-0.2 * 2.0 * kRoot2).epsilon(1e-7));

  // Zero drift: every rate is exactly zero, inside the sign band.
  Matrix b(2, 1);
  b << 1, 1;
  ControlSystem still(std::move(b), DriftField::linear(Matrix::Zero(2, 2)));
  TimeResult undecided = min_time_codim1(still, box, vec2(0.7, -0.5), vec2(-0.5, 0.3));
  CHECK(undecided.status == ReachStatus::Indeterminate);
  CHECK(std::isnan(undecided.time));
  CHECK(undecided.rate_sign_tol == 1e-12);
}

TEST_CASE("repeat solves are bit identical") {
  ControlSystem sys = diagonal_flow_system();
  ConvexBody box = unit_box2();
  TimeResult first = min_time_codim1(sys, box, vec2(0.7, -0.5), vec2(-0.5, 0.3));
  TimeResult second = min_time_codim1(sys, box, vec2(0.7, -0.5), vec2(-0.5, 0.3));
  CHECK(std::memcmp(&first.time, &second.time, sizeof(double)) == 0);
  CHECK(std::memcmp(&first.min_rate_found, &second.min_rate_found, sizeof(double)) == 0);
  CHECK(std::memcmp(&first.quadrature_error_estimate, &second.quadrature_error_estimate,
                    sizeof(double)) == 0);
}

TEST_CASE("coincident slow projections cost zero time") {
  ControlSystem sys = diagonal_flow_system();
  ConvexBody box = unit_box2();
  // y1 - y0 lies along the control direction (1,1).
  TimeResult result = min_time_codim1(sys, box, vec2(0.7, -0.5), vec2(0.9, -0.3));
  CHECK(result.status == ReachStatus::Finite);
  CHECK(result.time == 0.0);
  CHECK(std::isinf(result.min_rate_found));
  CHECK(result.arc_length <= 1e-12);
}

TEST_CASE("boundary and exterior endpoints are rejected") {
  ControlSystem sys = diagonal_flow_system();
  ConvexBody box = unit_box2();
  CHECK_THROWS_AS(min_time_codim1(sys, box, vec2(1.0, -0.5), vec2(-0.5, 0.3)), NotInterior);
  CHECK_THROWS_AS(min_time_codim1(sys, box, vec2(0.7, -0.5), vec2(-1.5, 0.3)), NotInterior);
  CHECK_THROWS_AS(min_time_lower_bound(sys, box, vec2(1.0, -0.5), vec2(-0.5, 0.3)), NotInterior);
}

TEST_CASE("systems with more than one slow direction are refused the exact path") {
  Matrix b(3, 1);
  b << 0, 0, 1;
  ControlSystem sys(std::move(b), DriftField::piecewise_counterexample());
  ConvexBody box = ConvexBody::box(Vector::Constant(3, -2.0), Vector::Constant(3, 2.0));
  CHECK_THROWS_AS(min_time_codim1(sys, box, vec3(-1, 0, 1), vec3(1, 0, 0)), NotCodimOne);
}

TEST_CASE("disc scenarios with attraction drifts match frozen quadrature values") {
  Scenario axis = load_scenario(scenario_path("rustic.json"));
  ControlSystem axis_sys = axis.make_system();
  TimeResult axis_time =
      min_time_codim1(axis_sys, *axis.body, axis.y0, axis.y1, axis.solver);
  REQUIRE(axis_time.status == ReachStatus::Finite);
  CHECK(axis_time.time == doctest::Approx(kAxisPullTime).epsilon(1e-9));
  CHECK(axis_time.arc_length == doctest::Approx(8.0).epsilon(1e-12));

  Scenario plain = load_scenario(scenario_path("rustic_plain.json"));
  ControlSystem plain_sys = plain.make_system();
  TimeResult plain_time =
      min_time_codim1(plain_sys, *plain.body, plain.y0, plain.y1, plain.solver);
  REQUIRE(plain_time.status == ReachStatus::Finite);
  CHECK(plain_time.time == doctest::Approx(kPlainPullTime).epsilon(1e-9));
}

TEST_CASE("branch integrals decompose the disc time") {
  Scenario axis = load_scenario(scenario_path("rustic.json"));
  ControlSystem sys = axis.make_system();
  const double left = integrate_reciprocal_rate(sys, *axis.body, axis.y0, axis.y1, 0.0, 1.0,
                                                RateMode::codim1, axis.solver);
  const double middle = integrate_reciprocal_rate(sys, *axis.body, axis.y0, axis.y1, 1.0, 7.0,
                                                  RateMode::codim1, axis.solver);
  const double right = integrate_reciprocal_rate(sys, *axis.body, axis.y0, axis.y1, 7.0, 8.0,
                                                 RateMode::codim1, axis.solver);
  CHECK(left == doctest::Approx(kAxisBranchLeft).epsilon(1e-8));
  CHECK(middle == doctest::Approx(kAxisBranchMiddle).epsilon(1e-8));
  CHECK(right == doctest::Approx(kAxisBranchRight).epsilon(1e-8));
  CHECK(left + middle + right == doctest::Approx(kAxisPullTime).epsilon(1e-8));
}

TEST_CASE("reciprocal-rate integration validates its interval and sign") {
  ControlSystem sys = diagonal_flow_system();
  ConvexBody box = unit_box2();
  Vector y0 = vec2(0.7, -0.5);
  Vector crossing = vec2(-0.6, 0.6);
  CHECK_THROWS_AS(integrate_reciprocal_rate(sys, box, y0, crossing, 0.0, 1.2 * kRoot2),
                  NonPositiveRate);
  Vector y1 = vec2(-0.5, 0.3);
  CHECK_THROWS_AS(integrate_reciprocal_rate(sys, box, y0, y1, -0.5, 1.0), Error);
  CHECK_THROWS_AS(integrate_reciprocal_rate(sys, box, y0, y1, 1.0, 0.5), Error);
  CHECK_THROWS_AS(integrate_reciprocal_rate(sys, box, y0, y1, 0.0, 10.0), Error);
}

TEST_CASE("three-dimensional ellipsoid time matches its frozen oracle") {
  Scenario sc = load_scenario(scenario_path("ellipsoid3d.json"));
  ControlSystem sys = sc.make_system();
  TimeResult result = min_time_codim1(sys, *sc.body, sc.y0, sc.y1, sc.solver);
  REQUIRE(result.status == ReachStatus::Finite);
  CHECK(result.time == doctest::Approx(kEllipsoidTime).epsilon(1e-9));
}

TEST_CASE("growing the body never increases the time") {
  ControlSystem sys = diagonal_flow_system();
  Vector y0 = vec2(0.7, -0.5);
  Vector y1 = vec2(-0.5, 0.3);
  double previous = std::numeric_limits<double>::infinity();
  for (double half : {1.0, 1.5, 2.0}) {
    TimeResult result = min_time_codim1(sys, unit_box2(half), y0, y1);
    REQUIRE(result.status == ReachStatus::Finite);
    CHECK(result.time <= previous * (1.0 + 1e-9) + 1e-12);
    previous = result.time;
  }
}

TEST_CASE("linear drift time is invariant under uniform dilation") {
  ControlSystem sys = diagonal_flow_system();
  TimeResult base = min_time_codim1(sys, unit_box2(1.0), vec2(0.7, -0.5), vec2(-0.5, 0.3));
  TimeResult doubled =
      min_time_codim1(sys, unit_box2(2.0), vec2(1.4, -1.0), vec2(-1.0, 0.6));
  REQUIRE(base.status == ReachStatus::Finite);
  REQUIRE(doubled.status == ReachStatus::Finite);
  CHECK(doubled.time == doctest::Approx(base.time).epsilon(1e-8));
}

TEST_CASE("the lower bound coincides with the exact time when dim H = 1") {
  ControlSystem sys = diagonal_flow_system();
  ConvexBody box = unit_box2();
  TimeResult exact = min_time_codim1(sys, box, vec2(0.7, -0.5), vec2(-0.5, 0.3));
  LowerBound bound = min_time_lower_bound(sys, box, vec2(0.7, -0.5), vec2(-0.5, 0.3));
  REQUIRE(!bound.infinite);
  CHECK(bound.bound == doctest::Approx(exact.time).epsilon(1e-8));
  CHECK(bound.arc_length == doctest::Approx(exact.arc_length).epsilon(1e-12));

  LowerBound blocked = min_time_lower_bound(sys, box, vec2(0.7, -0.5), vec2(-0.6, 0.6));
  CHECK(blocked.infinite);
  CHECK(blocked.rate_min <= 0.0);
}

TEST_CASE("rotation drift on a thin box certifies the sharp bound") {
  Scenario sc = load_scenario(scenario_path("rotation_bound.json"));
  ControlSystem sys = sc.make_system();
  LowerBound bound = min_time_lower_bound(sys, *sc.body, sc.y0, sc.y1, sc.solver);
  REQUIRE(!bound.infinite);
  CHECK(bound.bound == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(bound.arc_length == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("piecewise rail field bound has unit rate everywhere on the segment") {
  Scenario sc = load_scenario(scenario_path("counterexample3d.json"));
  ControlSystem sys = sc.make_system();
  LowerBound bound = min_time_lower_bound(sys, *sc.body, sc.y0, sc.y1, sc.solver);
  REQUIRE(!bound.infinite);
  CHECK(bound.bound == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(bound.rate_min == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two slow directions with constant drift give the ratio bound") {
  Matrix b(3, 1);
  b << 0, 0, 1;
  ControlSystem sys(std::move(b), DriftField::constant(vec3(0.3, 0.2, 0)));
  ConvexBody box = ConvexBody::box(Vector::Constant(3, -2.0), Vector::Constant(3, 2.0));
  LowerBound bound = min_time_lower_bound(sys, box, vec3(-1, -0.5, 0), vec3(0.5, 0.5, 0.3));
  REQUIRE(!bound.infinite);
  // Slow displacement (1.5, 1.0) against constant slow velocity (0.3, 0.2): five units.
  CHECK(bound.bound == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("travel time bound integrates the reciprocal speed profile") {
  CHECK(travel_time_bound([](double) { return 0.5; }, 3.0) == doctest::Approx(6.0).epsilon(1e-10));
  auto pull = [](double v) { return 1.0 / ((13.0 - v) * (13.0 - v)); };
  CHECK(travel_time_bound(pull, 6.0) == doctest::Approx(618.0).epsilon(1e-9));
  auto kinked = [](double v) {
    const double k = 0.6 - v;
    return k + 1.0 - std::abs(k);
  };
  CHECK(travel_time_bound(kinked, 1.0) ==
        doctest::Approx(0.6 + 0.5 * std::log(5.0)).epsilon(1e-9));
  CHECK_THROWS_AS(travel_time_bound([](double) { return 0.0; }, 1.0), NonPositiveRate);
  CHECK_THROWS_AS(travel_time_bound([](double) { return 1.0; }, 0.0), Error);
}

TEST_CASE("travel time bound matches simulated hitting times for random speed profiles") {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> span(1.0, 5.0);
  std::uniform_real_distribution<double> speed(0.5, 3.0);
  std::uniform_int_distribution<int> segments(2, 6);
  for (int trial = 0; trial < 20; ++trial) {
    const double m = span(rng);
    const int k = segments(rng);
    std::vector<double> knots(static_cast<std::size_t>(k) + 1);
    std::vector<double> values(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) {
      knots[i] = m * static_cast<double>(i) / static_cast<double>(k);
      values[i] = speed(rng);
    }
    auto g = [&](double y) {
      if (y <= 0.0) return values.front();
      if (y >= m) return values.back();
      const double cell = y / m * static_cast<double>(k);
      const auto idx = std::min(static_cast<std::size_t>(cell), knots.size() - 2);
      const double w = (y - knots[idx]) / (knots[idx + 1] - knots[idx]);
      return values[idx] + w * (values[idx + 1] - values[idx]);
    };
    const double bound = travel_time_bound(g, m, 1e-10);
    const double simulated = hitting_time_rk4(g, m, bound / 2e5);
    CHECK(std::abs(simulated - bound) <= 1e-4 * bound);
  }
}
