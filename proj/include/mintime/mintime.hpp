#pragma once

#include <functional>
#include <limits>

#include "mintime/quadrature.hpp"
#include "mintime/rate.hpp"

namespace mintime {

enum class ReachStatus { Finite, Unreachable, Indeterminate };

struct SolverConfig {
  double quad_tol = 1e-8;
  // Indeterminate band half-width, relative to the max |rate| on the profile
  // grid (absolute floor 1e-12 so a zero field classifies Indeterminate).
  double rate_sign_tol_scale = 1e-9;
  int grid = 256;
  unsigned seed = 0;
  int multistart = 16;
  double interior_margin_factor = 1e-8;  // x bounding_radius
  double sim_gap_tol = 0.05;             // relative, equivalence check

  RateOptions rate_options() const {
    RateOptions options;
    options.multistart = multistart;
    options.seed = seed;
    options.min_rate_grid = grid;
    return options;
  }
};

struct TimeResult {
  ReachStatus status = ReachStatus::Indeterminate;
  double time = std::numeric_limits<double>::quiet_NaN();  // valid iff Finite
  double min_rate_found = 0;
  double argmin_arc_position = 0;
  double quadrature_error_estimate = std::numeric_limits<double>::quiet_NaN();
  double rate_sign_tol = 0;
  double arc_length = 0;
};

struct LowerBound {
  bool infinite = false;
  double bound = 0;  // valid iff !infinite
  double rate_min = 0;
  double argmin_arc_position = 0;
  double quadrature_error_estimate = 0;
  double arc_length = 0;
};

// Trichotomy for one slow direction: positive minimum rate gives the exact
// time integral of 1/rate over the projected segment (arc length), a negative
// minimum is a crossing obstruction, and the tolerance band refuses to guess.
// Coincident projections return Finite with time 0.
TimeResult min_time_codim1(const ControlSystem& system, const ConvexBody& body, const Vector& y0,
                           const Vector& y1, const SolverConfig& config = {});

// General lower bound: same integral against the larger-slice rate; any
// non-positive rate on the segment certifies an infinite time.
LowerBound min_time_lower_bound(const ControlSystem& system, const ConvexBody& body,
                                const Vector& y0, const Vector& y1,
                                const SolverConfig& config = {});

// Integral of 1/g over [0, M]; the comparison-lemma bound for any scalar
// progress variable with speed at most g(level).
double travel_time_bound(const std::function<double(double)>& g, double m,
                         double quad_tol = 1e-8);

// Integral of 1/rate over a sub-interval [arc_lo, arc_hi] of the projected
// segment; exposes the per-branch pieces of the time integral.
double integrate_reciprocal_rate(const ControlSystem& system, const ConvexBody& body,
                                 const Vector& y0, const Vector& y1, double arc_lo, double arc_hi,
                                 RateMode mode = RateMode::codim1,
                                 const SolverConfig& config = {});

struct EquivalenceReport {
  ReachStatus status = ReachStatus::Indeterminate;
  double theorem_time = std::numeric_limits<double>::quiet_NaN();
  double best_sim_time = std::numeric_limits<double>::quiet_NaN();
  double gap_relative = std::numeric_limits<double>::quiet_NaN();
  bool report_produced = false;
  bool sandwich_ok = false;  // theorem_time <= best_sim_time
  bool gap_ok = false;       // gap_relative <= sim_gap_tol
};

// Runs the theorem side and the simulation oracle against each other
// (dim H = 1, Finite case); non-Finite statuses surface without a report.
EquivalenceReport equivalence_check_1d(const ControlSystem& system, const ConvexBody& body,
                                       const Vector& y0, const Vector& y1,
                                       const SolverConfig& config = {});

}  // namespace mintime
