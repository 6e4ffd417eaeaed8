#pragma once

#include <cmath>
#include <utility>

namespace mintime {

// Golden-section maximization on [a, b] to absolute x-tolerance; returns the
// best (x, f(x)) seen, so boundary maxima of monotone functions survive.
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double best_x = a, best_f = f(a);
  const double fb = f(b);
  if (fb > best_f) {
    best_x = b;
    best_f = fb;
  }
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
    if (f1 > best_f) {
      best_x = x1;
      best_f = f1;
    }
    if (f2 > best_f) {
      best_x = x2;
      best_f = f2;
    }
  }
  return {best_x, best_f};
}

template <typename F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol) {
  auto [x, neg] = golden_max([&](double t) { return -f(t); }, a, b, tol);
  return {x, -neg};
}

}  // namespace mintime
