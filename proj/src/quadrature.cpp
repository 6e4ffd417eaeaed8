#include "mintime/quadrature.hpp"

#include <cmath>

#include "mintime/errors.hpp"

namespace mintime {

namespace {

// Kronrod abscissae on [-1,1] (symmetric half) and weights; the even-index
// abscissae are the embedded 7-point Gauss nodes.
constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kKronrodW[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kGaussW[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                               0.417959183673469};

struct Panel {
  double kronrod;
  double gauss;
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double k = kKronrodW[7] * f(center);
  double g = kGaussW[3] * f(center);
  for (int i = 0; i < 7; ++i) {
    const double offset = half * kNodes[i];
    const double pair = f(center - offset) + f(center + offset);
    k += kKronrodW[i] * pair;
    if (i % 2 == 1) g += kGaussW[i / 2] * pair;
  }
  return {k * half, g * half};
}

struct Adaptive {
  const std::function<double(double)>& f;
  double rel_tol;
  double scale_per_width;  // |whole-interval estimate| / (b - a)
  int max_depth;
  double value = 0;
  double error = 0;
  int evaluations = 0;
  int panels = 0;

  void descend(double a, double b, const Panel& p, int depth) {
    const double err = std::abs(p.kronrod - p.gauss);
    // Half the budget per component so accumulated estimates stay within
    // rel_tol of the value even for sign-constant integrands.
    const double allowance =
        0.5 * rel_tol * std::max(std::abs(p.kronrod), scale_per_width * (b - a));
    if (err <= allowance || depth >= max_depth) {
      value += p.kronrod;
      error += err;
      ++panels;
      return;
    }
    const double mid = 0.5 * (a + b);
    const Panel left = evaluate_panel(f, a, mid);
    const Panel right = evaluate_panel(f, mid, b);
    evaluations += 30;
    descend(a, mid, left, depth + 1);
    descend(mid, b, right, depth + 1);
  }
};

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, int max_depth) {
  if (!(b > a)) throw Error("integrate_adaptive: requires a < b");
  if (!(rel_tol > 0)) throw Error("integrate_adaptive: requires rel_tol > 0");
  const Panel whole = evaluate_panel(f, a, b);
  Adaptive state{f, rel_tol, std::abs(whole.kronrod) / (b - a), max_depth};
  state.evaluations = 15;
  state.descend(a, b, whole, 0);
  return {state.value, state.error, state.evaluations, state.panels};
}

}  // namespace mintime
