#pragma once

#include <vector>

#include "mintime/system.hpp"

namespace mintime {

enum class RateMode {
  codim1,              // slice directions = ran(B)
  general_lower_bound  // slice directions = ran(B) plus the part of H orthogonal to h1-h0
};

enum class RateBackend { automatic, exact, generic };

struct RateOptions {
  double rate_tol = 1e-8;
  int multistart = 16;       // generic backend starts
  unsigned seed = 0;         // generic backend start sampling
  int min_rate_grid = 256;   // dense grid before golden-section refinement
  RateBackend backend = RateBackend::automatic;
};

struct RateQuery {
  Vector h;   // anchor on [h0, h1], lifted to R^n
  Vector h0;
  Vector h1;
  RateMode mode = RateMode::codim1;
};

struct RateResult {
  double rate = 0;
  Vector maximizer;  // slice point attaining the rate
};

// Directions spanning the slice for the given mode.
Basis slice_directions(const ControlSystem& system, const Vector& h0, const Vector& h1,
                       RateMode mode);

// Supremum of <F(x), h1-h0>/|h1-h0| over (h + span(slice directions)) ∩ body.
// Exact support-function backend for linear drift on box/ellipsoid/polytope;
// seeded multi-start chord search otherwise. May be negative.
RateResult slice_rate_full(const ControlSystem& system, const ConvexBody& body,
                           const RateQuery& query, const RateOptions& options = {});
double slice_rate(const ControlSystem& system, const ConvexBody& body, const RateQuery& query,
                  const RateOptions& options = {});

struct ProfilePoint {
  double arc_position = 0;
  double rate = 0;
  Vector maximizer;
};

// Uniform sampling of the rate along [h0, h1]; arc_position in [0, |h1-h0|].
std::vector<ProfilePoint> rate_profile(const ControlSystem& system, const ConvexBody& body,
                                       const Vector& h0, const Vector& h1, RateMode mode,
                                       int grid, const RateOptions& options = {});

struct MinRateResult {
  double min_value = 0;
  double argmin_arc_position = 0;
};

// Global minimum of the rate over the segment: dense grid then golden-section
// refinement on the bracketing cell, to 1e-8 in arc position.
MinRateResult min_rate(const ControlSystem& system, const ConvexBody& body, const Vector& h0,
                       const Vector& h1, RateMode mode, const RateOptions& options = {});

}  // namespace mintime
