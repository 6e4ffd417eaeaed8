#include "mintime/mintime.hpp"

#include <algorithm>
#include <cmath>

#include "mintime/scalar_opt.hpp"

namespace mintime {

namespace {

void require_interior(const ConvexBody& body, const Vector& y, const char* which,
                      const SolverConfig& config) {
  const double margin = config.interior_margin_factor * body.bounding_radius();
  if (!body.contains_ball(y, margin))
    throw NotInterior(std::string(which) + " is not strictly interior to the body");
}

struct SegmentRates {
  Vector h0;
  Vector h1;
  double length = 0;
  std::vector<ProfilePoint> profile;
  double scale = 0;     // max |rate| on the grid
  double sign_tol = 0;  // indeterminate band half-width
  MinRateResult minimum;
};

SegmentRates analyze_segment(const ControlSystem& system, const ConvexBody& body,
                             const Vector& y0, const Vector& y1, RateMode mode,
                             const SolverConfig& config) {
  SegmentRates seg;
  seg.h0 = system.slow_projection(y0);
  seg.h1 = system.slow_projection(y1);
  seg.length = (seg.h1 - seg.h0).norm();
  if (seg.length <= 1e-12) return seg;

  const RateOptions options = config.rate_options();
  seg.profile =
      rate_profile(system, body, seg.h0, seg.h1, mode, std::max(2, config.grid), options);
  for (const auto& point : seg.profile) seg.scale = std::max(seg.scale, std::abs(point.rate));
  seg.sign_tol = std::max(config.rate_sign_tol_scale * seg.scale, 1e-12);

  std::size_t best = 0;
  for (std::size_t i = 1; i < seg.profile.size(); ++i)
    if (seg.profile[i].rate < seg.profile[best].rate) best = i;
  auto rate_at = [&](double arc) {
    RateQuery query{seg.h0 + (arc / seg.length) * (seg.h1 - seg.h0), seg.h0, seg.h1, mode};
    return slice_rate(system, body, query, options);
  };
  const double lo = best == 0 ? 0.0 : seg.profile[best - 1].arc_position;
  const double hi =
      best + 1 == seg.profile.size() ? seg.length : seg.profile[best + 1].arc_position;
  auto [arc, value] = golden_min(rate_at, lo, hi, 1e-8);
  seg.minimum = value < seg.profile[best].rate
                    ? MinRateResult{value, arc}
                    : MinRateResult{seg.profile[best].rate, seg.profile[best].arc_position};
  return seg;
}

QuadratureResult integrate_segment(const ControlSystem& system, const ConvexBody& body,
                                   const SegmentRates& seg, RateMode mode, double arc_lo,
                                   double arc_hi, const SolverConfig& config) {
  const RateOptions options = config.rate_options();
  auto integrand = [&](double arc) {
    RateQuery query{seg.h0 + (arc / seg.length) * (seg.h1 - seg.h0), seg.h0, seg.h1, mode};
    const double rate = slice_rate(system, body, query, options);
    if (rate <= 0)
      throw NonPositiveRate("reciprocal-rate integrand hit a non-positive rate");
    return 1.0 / rate;
  };
  return integrate_adaptive(integrand, arc_lo, arc_hi, config.quad_tol);
}

}  // namespace

TimeResult min_time_codim1(const ControlSystem& system, const ConvexBody& body, const Vector& y0,
                           const Vector& y1, const SolverConfig& config) {
  if (system.slow_dimension() != 1)
    throw NotCodimOne("min_time_codim1 requires exactly one slow direction");
  require_interior(body, y0, "y0", config);
  require_interior(body, y1, "y1", config);

  const SegmentRates seg = analyze_segment(system, body, y0, y1, RateMode::codim1, config);
  TimeResult result;
  result.arc_length = seg.length;
  if (seg.length <= 1e-12) {
    // Coincident slow projections: the in-slice segment lies in the body by
    // convexity and is traversed in vanishing time by large controls.
    result.status = ReachStatus::Finite;
    result.time = 0;
    result.min_rate_found = std::numeric_limits<double>::infinity();
    result.quadrature_error_estimate = 0;
    result.rate_sign_tol = 1e-12;
    return result;
  }

  result.min_rate_found = seg.minimum.min_value;
  result.argmin_arc_position = seg.minimum.argmin_arc_position;
  result.rate_sign_tol = seg.sign_tol;
  if (seg.minimum.min_value > seg.sign_tol) {
    const QuadratureResult quad =
        integrate_segment(system, body, seg, RateMode::codim1, 0.0, seg.length, config);
    result.status = ReachStatus::Finite;
    result.time = quad.value;
    result.quadrature_error_estimate = quad.error_estimate;
  } else if (seg.minimum.min_value < -seg.sign_tol) {
    result.status = ReachStatus::Unreachable;
  } else {
    result.status = ReachStatus::Indeterminate;
  }
  return result;
}

LowerBound min_time_lower_bound(const ControlSystem& system, const ConvexBody& body,
                                const Vector& y0, const Vector& y1, const SolverConfig& config) {
  require_interior(body, y0, "y0", config);
  require_interior(body, y1, "y1", config);

  const SegmentRates seg =
      analyze_segment(system, body, y0, y1, RateMode::general_lower_bound, config);
  LowerBound result;
  result.arc_length = seg.length;
  if (seg.length <= 1e-12) {
    result.rate_min = std::numeric_limits<double>::infinity();
    return result;  // trivial bound 0
  }
  result.rate_min = seg.minimum.min_value;
  result.argmin_arc_position = seg.minimum.argmin_arc_position;
  if (seg.minimum.min_value <= 0) {
    // Projected speed is nonpositive somewhere on the segment: no trajectory
    // crosses that slice, so the bound is infinite.
    result.infinite = true;
    return result;
  }
  const QuadratureResult quad =
      integrate_segment(system, body, seg, RateMode::general_lower_bound, 0.0, seg.length, config);
  result.bound = quad.value;
  result.quadrature_error_estimate = quad.error_estimate;
  return result;
}

double travel_time_bound(const std::function<double(double)>& g, double m, double quad_tol) {
  if (!(m > 0)) throw Error("travel_time_bound: M must be positive");
  auto integrand = [&](double v) {
    const double speed = g(v);
    if (speed <= 0) throw NonPositiveRate("travel_time_bound: g must be positive on [0, M]");
    return 1.0 / speed;
  };
  return integrate_adaptive(integrand, 0.0, m, quad_tol).value;
}

double integrate_reciprocal_rate(const ControlSystem& system, const ConvexBody& body,
                                 const Vector& y0, const Vector& y1, double arc_lo, double arc_hi,
                                 RateMode mode, const SolverConfig& config) {
  SegmentRates seg;
  seg.h0 = system.slow_projection(y0);
  seg.h1 = system.slow_projection(y1);
  seg.length = (seg.h1 - seg.h0).norm();
  if (seg.length <= 1e-12) throw Error("integrate_reciprocal_rate: projections coincide");
  if (!(0.0 <= arc_lo && arc_lo < arc_hi && arc_hi <= seg.length + 1e-9))
    throw Error("integrate_reciprocal_rate: arc interval outside the segment");
  return integrate_segment(system, body, seg, mode, arc_lo, std::min(arc_hi, seg.length), config)
      .value;
}

}  // namespace mintime
