#pragma once

#include <functional>

namespace mintime {

struct QuadratureResult {
  double value = 0;
  double error_estimate = 0;
  int evaluations = 0;
  int panels = 0;
};

// Adaptive Gauss-Kronrod 7-15 with deterministic depth-first bisection.
// A panel is accepted when |K15 - G7| <= rel_tol * max(|panel|, whole-interval
// scale prorated by width); error estimates of accepted panels accumulate.
// Integrands with isolated kinks converge by subdivision around the kink.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, int max_depth = 52);

}  // namespace mintime
