#include "mintime/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>

#include "mintime/scalar_opt.hpp"
#include "mintime/util.hpp"

namespace mintime {

namespace {

// The slice in its own coordinates: either rows z <= rhs (box/polytope body)
// or (z - center)' m (z - center) <= radius2 (ellipsoid body). Everything the
// search needs (feasibility, exact chords, support points) reads this.
struct SliceSet {
  bool quadric = false;
  Matrix rows;
  Vector rhs;
  std::vector<Vector> corner_points;  // polytope vertices in slice coordinates
  Matrix m;
  Eigen::LLT<Matrix> m_llt;
  Vector center;
  double radius2 = 0;
  Eigen::Index k = 0;

  bool feasible(const Vector& z, double tol) const {
    if (quadric) {
      const Vector d = z - center;
      return d.dot(m * d) <= radius2 + tol;
    }
    return ((rows * z - rhs).array() <= tol).all();
  }

  // argmax of g'z over the set.
  Vector support_point(const Vector& g) const {
    if (!quadric) {
      double best = -std::numeric_limits<double>::infinity();
      const Vector* pick = &corner_points.front();
      for (const auto& v : corner_points) {
        const double val = g.dot(v);
        if (val > best) {
          best = val;
          pick = &v;
        }
      }
      return *pick;
    }
    const Vector w = m_llt.solve(g);
    const double gw = g.dot(w);
    if (gw <= 0 || radius2 <= 0) return center;
    return center + std::sqrt(radius2 / gw) * w;
  }

  // t-interval of {z + t dir} inside the set; z must be feasible.
  std::pair<double, double> chord(const Vector& z, const Vector& dir) const {
    if (quadric) {
      const Vector d = z - center;
      const double a = dir.dot(m * dir);
      if (a <= 0) return {0, 0};
      const double b = 2.0 * dir.dot(m * d);
      const double c = d.dot(m * d) - radius2;
      const double disc = std::max(0.0, b * b - 4.0 * a * c);
      const double root = std::sqrt(disc);
      return {(-b - root) / (2.0 * a), (-b + root) / (2.0 * a)};
    }
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    const Vector slack = rhs - rows * z;
    const Vector speed = rows * dir;
    for (Eigen::Index i = 0; i < speed.size(); ++i) {
      if (speed[i] > 1e-14)
        hi = std::min(hi, slack[i] / speed[i]);
      else if (speed[i] < -1e-14)
        lo = std::max(lo, slack[i] / speed[i]);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) return {0, 0};
    return {std::min(lo, 0.0), std::max(hi, 0.0)};
  }

  Vector inner_point() const {
    if (quadric) return center;
    Vector sum = Vector::Zero(k);
    for (const auto& v : corner_points) sum += v;
    return sum / static_cast<double>(corner_points.size());
  }
};

SliceSet build_slice_set(const ConvexBody& body, const Vector& anchor, const Basis& directions) {
  SliceSet set;
  set.k = directions.dimension();
  const Matrix& v = directions.vectors;
  if (body.is_ellipsoid()) {
    const auto& e = std::get<EllipsoidShape>(body.shape());
    set.quadric = true;
    set.m = v.transpose() * e.shape * v;
    set.m_llt.compute(set.m);
    if (set.m_llt.info() != Eigen::Success)
      throw Error("slice_rate: degenerate slice metric");
    const Vector offset = anchor - e.center;
    set.center = -set.m_llt.solve(v.transpose() * (e.shape * offset));
    set.radius2 =
        1.0 - offset.dot(e.shape * offset) + set.center.dot(set.m * set.center);
    if (set.radius2 < -1e-12)
      throw EmptySlice("slice_rate: no point of the affine slice passes membership");
    set.radius2 = std::max(set.radius2, 0.0);
    return set;
  }
  Matrix normals;
  Vector offsets;
  body.halfspaces(normals, offsets);
  set.rows = normals * v;
  set.rhs = offsets - normals * anchor;
  try {
    set.corner_points = enumerate_vertices(set.rows, set.rhs);
  } catch (const Error&) {
    throw EmptySlice("slice_rate: no point of the affine slice passes membership");
  }
  return set;
}

void validate_query(const RateQuery& query) {
  const double length = (query.h1 - query.h0).norm();
  if (length <= 1e-12) throw Error("slice_rate: |h1 - h0| must exceed 1e-12");
  const Vector direction = (query.h1 - query.h0) / length;
  const Vector offset = query.h - query.h0;
  const double along = offset.dot(direction);
  const double off_segment = (offset - along * direction).norm();
  const double scale = 1.0 + query.h0.norm() + query.h1.norm();
  if (off_segment > 1e-10 * scale || along < -1e-8 * scale || along > length + 1e-8 * scale)
    throw Error("slice_rate: h must lie on the segment [h0, h1]");
}

struct Objective {
  const ControlSystem* system;
  const Vector* anchor;
  const Matrix* v;
  Vector direction;  // unit, along h1 - h0

  double operator()(const Vector& z) const {
    return system->drift().eval(*anchor + *v * z).dot(direction);
  }
};

RateResult exact_linear_rate(const SliceSet& set, const Matrix& a, const Vector& anchor,
                             const Matrix& v, const Vector& direction) {
  const Vector c = a.transpose() * direction;
  const Vector g = v.transpose() * c;
  const double base = c.dot(anchor);
  Vector z_star;
  if (set.quadric) {
    const Vector w = set.m_llt.solve(g);
    const double gw = g.dot(w);
    z_star = set.center;
    if (gw > 0 && set.radius2 > 0) z_star += std::sqrt(set.radius2 / gw) * w;
  } else {
    z_star = set.support_point(g);
  }
  return {base + g.dot(z_star), anchor + v * z_star};
}

RateResult generic_rate(const SliceSet& set, const Objective& objective, const Vector& anchor,
                        const Matrix& v, const RateOptions& options) {
  const Eigen::Index k = set.k;
  std::mt19937_64 rng(options.seed ^ 0x853c49e6748fea9bull);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Extent box from support points; also provides a length scale.
  Vector box_lo(k), box_hi(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    Vector axis = Vector::Zero(k);
    axis[i] = 1.0;
    box_hi[i] = set.support_point(axis)[i];
    axis[i] = -1.0;
    box_lo[i] = set.support_point(axis)[i];
  }
  const double span = std::max((box_hi - box_lo).norm(), 1e-9);
  const double x_tol = 1e-12 * (1.0 + span);

  std::vector<Vector> starts;
  auto add_start = [&](const Vector& z) {
    if (!set.feasible(z, 1e-12)) return;
    for (const auto& known : starts)
      if ((known - z).norm() < 1e-9 * span) return;
    starts.push_back(z);
  };

  add_start(set.inner_point());
  add_start(Vector::Zero(k));
  if (!set.quadric)
    for (const auto& corner : set.corner_points) add_start(corner);
  if (k == 1) {
    for (int i = 0; i < 33; ++i)
      add_start(box_lo + (box_hi - box_lo) * (i / 32.0));
  } else if (k == 2) {
    for (int i = 0; i < 17; ++i)
      for (int j = 0; j < 17; ++j) {
        Vector z(2);
        z[0] = box_lo[0] + (box_hi[0] - box_lo[0]) * (i / 16.0);
        z[1] = box_lo[1] + (box_hi[1] - box_lo[1]) * (j / 16.0);
        add_start(z);
      }
  }
  for (int attempt = 0; attempt < 40 * options.multistart; ++attempt) {
    if (static_cast<int>(starts.size()) >= 8 * options.multistart) break;
    Vector z(k);
    for (Eigen::Index i = 0; i < k; ++i)
      z[i] = box_lo[i] + (box_hi[i] - box_lo[i]) * unit(rng);
    add_start(z);
  }

  std::vector<std::pair<double, std::size_t>> ranked(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) ranked[i] = {objective(starts[i]), i};
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& lhs, const auto& rhs) { return lhs.first > rhs.first; });
  const std::size_t keep = std::min<std::size_t>(std::max(1, options.multistart), ranked.size());

  auto line_search = [&](Vector& z, double& value, const Vector& dir) {
    const double norm = dir.norm();
    if (norm < 1e-14) return false;
    const Vector d = dir / norm;
    auto [lo, hi] = set.chord(z, d);
    if (hi - lo < x_tol) return false;
    auto [t, val] = golden_max([&](double s) { return objective(z + s * d); }, lo, hi, x_tol);
    if (val > value + 1e-15 * (1.0 + std::abs(value))) {
      z += t * d;
      value = val;
      return true;
    }
    return false;
  };

  Vector best_z = starts[ranked.front().second];
  double best_value = ranked.front().first;

  for (std::size_t rank = 0; rank < keep; ++rank) {
    Vector z = starts[ranked[rank].second];
    double value = ranked[rank].first;
    const double fd_step = 1e-6 * (1.0 + span);
    for (int iter = 0; iter < 60; ++iter) {
      bool improved = false;
      // Support step along a finite-difference gradient.
      Vector grad(k);
      for (Eigen::Index i = 0; i < k; ++i) {
        Vector probe = z;
        probe[i] += fd_step;
        const double up = objective(probe);
        probe[i] = z[i] - fd_step;
        grad[i] = (up - objective(probe)) / (2.0 * fd_step);
      }
      if (grad.norm() > 1e-14) {
        const Vector target = set.support_point(grad);
        if ((target - z).norm() > x_tol) {
          auto [t, val] =
              golden_max([&](double s) { return objective(z + s * (target - z)); }, 0.0, 1.0,
                         x_tol / std::max(1.0, (target - z).norm()));
          if (val > value + 1e-15 * (1.0 + std::abs(value))) {
            z += t * (target - z);
            value = val;
            improved = true;
          }
        }
      }
      for (Eigen::Index i = 0; i < k; ++i) {
        Vector axis = Vector::Zero(k);
        axis[i] = 1.0;
        improved = line_search(z, value, axis) || improved;
      }
      for (int extra = 0; extra < 2; ++extra) {
        Vector dir(k);
        for (Eigen::Index i = 0; i < k; ++i) dir[i] = 2.0 * unit(rng) - 1.0;
        improved = line_search(z, value, dir) || improved;
      }
      if (!improved) break;
    }
    if (value > best_value) {
      best_value = value;
      best_z = z;
    }
  }

  return {best_value, anchor + v * best_z};
}

}  // namespace

Basis slice_directions(const ControlSystem& system, const Vector& h0, const Vector& h1,
                       RateMode mode) {
  if (mode == RateMode::codim1 || system.slow_dimension() == 1) return system.fast_basis();
  const Basis& slow = system.slow_basis();
  const Vector d = slow.vectors.transpose() * (h1 - h0);
  const double norm = d.norm();
  if (norm <= 1e-12) throw Error("slice_directions: h1 - h0 has no slow component");
  Matrix column(slow.dimension(), 1);
  column.col(0) = d / norm;
  const Basis within = complement_basis(Basis{column});
  Matrix directions(system.state_dimension(),
                    within.dimension() + system.control_dimension());
  directions.leftCols(within.dimension()) = slow.vectors * within.vectors;
  directions.rightCols(system.control_dimension()) = system.fast_basis().vectors;
  return Basis{directions};
}

RateResult slice_rate_full(const ControlSystem& system, const ConvexBody& body,
                           const RateQuery& query, const RateOptions& options) {
  validate_query(query);
  const Vector direction = (query.h1 - query.h0).normalized();
  const Basis directions = slice_directions(system, query.h0, query.h1, query.mode);
  const SliceSet set = build_slice_set(body, query.h, directions);

  const bool want_exact = options.backend != RateBackend::generic && system.drift().is_linear();
  if (want_exact)
    return exact_linear_rate(set, system.drift().linear_matrix(), query.h, directions.vectors,
                             direction);
  if (options.backend == RateBackend::exact)
    throw Error("slice_rate: exact backend requires linear drift");
  Objective objective{&system, &query.h, &directions.vectors, direction};
  return generic_rate(set, objective, query.h, directions.vectors, options);
}

double slice_rate(const ControlSystem& system, const ConvexBody& body, const RateQuery& query,
                  const RateOptions& options) {
  return slice_rate_full(system, body, query, options).rate;
}

std::vector<ProfilePoint> rate_profile(const ControlSystem& system, const ConvexBody& body,
                                       const Vector& h0, const Vector& h1, RateMode mode,
                                       int grid, const RateOptions& options) {
  if (grid < 2) throw Error("rate_profile: grid must be at least 2");
  const double length = (h1 - h0).norm();
  std::vector<ProfilePoint> profile(grid);
  std::exception_ptr failure;
  std::mutex failure_guard;
  parallel_for(static_cast<std::size_t>(grid), [&](std::size_t i) {
    try {
      const double arc = length * static_cast<double>(i) / (grid - 1);
      RateQuery query{h0 + (arc / length) * (h1 - h0), h0, h1, mode};
      RateResult result = slice_rate_full(system, body, query, options);
      profile[i] = {arc, result.rate, std::move(result.maximizer)};
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_guard);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return profile;
}

MinRateResult min_rate(const ControlSystem& system, const ConvexBody& body, const Vector& h0,
                       const Vector& h1, RateMode mode, const RateOptions& options) {
  const int grid = std::max(2, options.min_rate_grid);
  const std::vector<ProfilePoint> profile = rate_profile(system, body, h0, h1, mode, grid, options);
  std::size_t best = 0;
  for (std::size_t i = 1; i < profile.size(); ++i)
    if (profile[i].rate < profile[best].rate) best = i;

  const double length = (h1 - h0).norm();
  const double lo = best == 0 ? 0.0 : profile[best - 1].arc_position;
  const double hi = best + 1 == profile.size() ? length : profile[best + 1].arc_position;
  auto rate_at = [&](double arc) {
    RateQuery query{h0 + (arc / length) * (h1 - h0), h0, h1, mode};
    return slice_rate(system, body, query, options);
  };
  auto [arc, value] = golden_min(rate_at, lo, hi, 1e-8);
  if (profile[best].rate <= value)
    return {profile[best].rate, profile[best].arc_position};
  return {value, arc};
}

}  // namespace mintime
