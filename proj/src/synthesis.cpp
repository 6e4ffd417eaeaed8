#include "mintime/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <utility>

namespace mintime {

namespace {

Vector saturate(Vector c, double cap) {
  const double norm = c.norm();
  if (norm > cap) c *= cap / norm;
  return c;
}

// Everything the feedback law needs, captured once so the law itself is a
// pure deterministic function of (t, y).
struct Guidance {
  ControlSystem sys;
  Vector y0;
  Vector y1;
  Vector d;       // unit slow direction, ambient coordinates; zero if coincident
  double length = 0;
  Matrix v;       // fast basis columns
  Vector w1;      // fast coordinates of y1
  std::vector<double> arcs;
  std::vector<Vector> targets;  // fast coordinates of the shrunk maximizer curve
  double max_rate = 0;
  double fast_gain = 0;
  double dt = 0;
  double endpoint_tol = 0;
  double kp = 0;

  Vector target_at(double arc, Vector* slope) const {
    const std::size_t count = targets.size();
    if (count < 2) {
      *slope = Vector::Zero(w1.size());
      return count == 1 ? targets[0] : w1;
    }
    const double step = length / static_cast<double>(count - 1);
    const double clamped = std::clamp(arc, 0.0, length);
    const std::size_t cell =
        std::min(static_cast<std::size_t>(clamped / step), count - 2);
    const double theta = std::clamp((clamped - arcs[cell]) / step, 0.0, 1.0);
    *slope = (targets[cell + 1] - targets[cell]) / step;
    return (1.0 - theta) * targets[cell] + theta * targets[cell + 1];
  }
};

double slow_rate_at(const Guidance& g, const Vector& x) {
  try {
    return g.d.dot(g.sys.drift().eval(x));
  } catch (const SingularPoint&) {
    return 0.0;
  }
}

ControlLaw law_from_guidance(std::shared_ptr<const Guidance> g) {
  // The capture phase latches: the slow drift along the dive path can be
  // negative, so a memoryless trigger would flip back to cruise mid-dive and
  // orbit the trigger surface forever. Reset at t = 0 so the law can be
  // reused across simulation runs.
  auto latched = std::make_shared<bool>(false);
  return ControlLaw([g, latched](double t, const Vector& y) -> Vector {
    if (t == 0.0) *latched = false;
    const Vector f = g->sys.drift().eval(y);
    const Vector w = g->v.transpose() * y;
    Vector c;
    if (g->length <= 1e-12) {
      c = saturate(g->kp * (g->w1 - w), g->fast_gain);
    } else {
      const double progress = g->d.dot(y - g->y0);
      const double remaining = g->length - progress;
      const Vector dive = g->w1 - w;
      const double dive_time = dive.norm() / g->fast_gain;
      const double slack_coarse =
          std::max(2.0 * g->dt * g->max_rate, 0.5 * g->endpoint_tol);
      bool capture = *latched || remaining <= 0;
      // The dive toward y1 accumulates slow drift; trigger it when the
      // remaining slow distance matches that accumulation. The coarse gate
      // avoids sampling the drift along the dive path far from the endpoint.
      if (!capture && remaining <= 1.5 * g->max_rate * dive_time + 2.0 * slack_coarse) {
        double mean_s = 0;
        double max_s = 0;
        for (int k = 0; k <= 8; ++k) {
          const double s = slow_rate_at(*g, y + (k / 8.0) * (g->y1 - y));
          mean_s += s;
          max_s = std::max(max_s, std::abs(s));
        }
        mean_s /= 9.0;
        const double slack = std::max(2.0 * g->dt * max_s, 0.5 * g->endpoint_tol);
        capture = remaining <= mean_s * dive_time + slack;
      }
      if (capture) {
        *latched = true;
        c = saturate(g->kp * dive, g->fast_gain);
      } else {
        Vector slope;
        const Vector target = g->target_at(progress, &slope);
        // Feedforward keeps the tracking lag proportional to dt; maximizer
        // jumps show up as steep interpolation ramps and ride the saturation,
        // the finite-amplitude version of reconnection impulses.
        c = saturate(g->kp * (target - w) + slope * g->d.dot(f), g->fast_gain);
      }
    }
    return g->sys.control_for(g->v * c - g->sys.fast_projection(f));
  });
}

ControlLaw make_law(const ControlSystem& system, const ConvexBody& body, const Vector& y0,
                    const Vector& y1, const std::vector<ProfilePoint>& profile,
                    const SynthesisConfig& resolved) {
  auto g = std::make_shared<Guidance>(Guidance{system});
  g->y0 = y0;
  g->y1 = y1;
  const Vector h0 = system.slow_projection(y0);
  const Vector h1 = system.slow_projection(y1);
  g->length = (h1 - h0).norm();
  g->v = system.fast_basis().vectors;
  g->w1 = g->v.transpose() * y1;
  g->fast_gain = resolved.fast_gain;
  g->dt = resolved.dt;
  g->endpoint_tol = resolved.endpoint_tol;
  g->kp = 0.25 / resolved.dt;
  if (g->length <= 1e-12) {
    g->d = Vector::Zero(y0.size());
    return law_from_guidance(std::move(g));
  }

  g->d = (h1 - h0) / g->length;
  const double lipschitz =
      system.drift().lipschitz_constant().value_or(estimate_lipschitz(system.drift(), body));
  const double delta_geom = resolved.delta / (lipschitz + 1.0);
  g->arcs.reserve(profile.size());
  g->targets.reserve(profile.size());
  for (const auto& point : profile) {
    g->max_rate = std::max(g->max_rate, point.rate);
    // Shrink along the chord toward the straight-segment point, which is
    // interior by convexity; too thin a slice means delta is too large.
    const Vector seg = y0 + (point.arc_position / g->length) * (y1 - y0);
    const Vector inward = seg - point.maximizer;
    const double chord = inward.norm();
    if (chord <= delta_geom)
      throw SynthesisInfeasible(
          "delta too large: the shrunk maximizer curve would leave the body near arc position " +
          std::to_string(point.arc_position));
    g->arcs.push_back(point.arc_position);
    g->targets.push_back(g->v.transpose() * (point.maximizer + (delta_geom / chord) * inward));
  }
  return law_from_guidance(std::move(g));
}

}  // namespace

SynthesisConfig resolve_synthesis_config(const ControlSystem& system, const ConvexBody& body,
                                         const std::vector<ProfilePoint>& profile,
                                         SynthesisConfig config) {
  const double radius = body.bounding_radius();
  const double max_speed = estimate_max_speed(system.drift(), body);
  if (config.delta <= 0) {
    double mean_rate = 0;
    for (const auto& point : profile) mean_rate += point.rate;
    if (!profile.empty()) mean_rate /= static_cast<double>(profile.size());
    config.delta = std::max(0.05 * mean_rate, 1e-12);
  }
  if (config.fast_gain <= 0) config.fast_gain = 1e3 * std::max(max_speed, 1e-9);
  if (config.dt <= 0) config.dt = 2.0 * radius / (100.0 * (config.fast_gain + 2.0 * max_speed));
  if (config.endpoint_tol <= 0) config.endpoint_tol = 1e-3 * radius;
  if (config.profile_grid < 2) config.profile_grid = 257;
  return config;
}

ControlLaw synthesize_control(const ControlSystem& system, const ConvexBody& body,
                              const Vector& y0, const Vector& y1, const SynthesisConfig& config,
                              const SolverConfig& solver) {
  const TimeResult upstream = min_time_codim1(system, body, y0, y1, solver);
  if (upstream.status != ReachStatus::Finite)
    throw SynthesisInfeasible("cannot synthesize: minimal-time status is not Finite");
  const Vector h0 = system.slow_projection(y0);
  const Vector h1 = system.slow_projection(y1);
  std::vector<ProfilePoint> profile;
  if ((h1 - h0).norm() > 1e-12)
    profile = rate_profile(system, body, h0, h1, RateMode::codim1,
                           std::max(2, config.profile_grid), solver.rate_options());
  return make_law(system, body, y0, y1, profile,
                  resolve_synthesis_config(system, body, profile, config));
}

Trajectory simulate(const ControlSystem& system, const ControlLaw& law, const Vector& y0,
                    double horizon, double dt,
                    const std::function<bool(const Vector&)>& membership,
                    const std::optional<SimulationTarget>& target, double blowup_radius) {
  if (dt <= 0) throw Error("simulate: dt must be positive");
  if (horizon < dt) throw Error("simulate: horizon must be at least dt");
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-12));

  Trajectory traj;
  traj.all_inside = true;
  Vector y = y0;
  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * dt;
    const Vector u = law(t, y);
    const bool inside = membership(y);
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.controls.push_back(u);
    traj.inside_flags.push_back(inside);
    if (!inside) {
      traj.all_inside = false;
      break;
    }
    if (target && (y - target->y1).norm() <= target->endpoint_tol) {
      traj.reached = true;
      traj.arrival_time = t;
      break;
    }
    if (i == steps) break;

    const Vector k1 = system.closed_loop(y, u);
    const Vector k2 = system.closed_loop(y + (dt / 2) * k1, law(t + dt / 2, y + (dt / 2) * k1));
    const Vector k3 = system.closed_loop(y + (dt / 2) * k2, law(t + dt / 2, y + (dt / 2) * k2));
    const Vector k4 = system.closed_loop(y + dt * k3, law(t + dt, y + dt * k3));
    y += (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    if (y.norm() > 10 * blowup_radius)
      throw StepBlowup("simulate: state norm exceeded 10x the bounding radius");
  }
  if (target) traj.terminal_error = (traj.states.back() - target->y1).norm();
  traj.feasible = traj.all_inside && (!target || traj.reached);
  return traj;
}

std::pair<double, std::vector<Trajectory>> empirical_min_time(
    const ControlSystem& system, const ConvexBody& body, const Vector& y0, const Vector& y1,
    SynthesisConfig config, std::vector<double> delta_schedule, const SolverConfig& solver) {
  const TimeResult upstream = min_time_codim1(system, body, y0, y1, solver);
  if (upstream.status != ReachStatus::Finite)
    throw NoFeasibleRun("empirical_min_time: minimal-time status is not Finite");

  const Vector h0 = system.slow_projection(y0);
  const Vector h1 = system.slow_projection(y1);
  std::vector<ProfilePoint> profile;
  if ((h1 - h0).norm() > 1e-12)
    profile = rate_profile(system, body, h0, h1, RateMode::codim1,
                           std::max(2, config.profile_grid), solver.rate_options());
  const SynthesisConfig resolved = resolve_synthesis_config(system, body, profile, config);

  if (delta_schedule.empty()) {
    if (profile.empty()) {
      delta_schedule = {resolved.delta};
    } else {
      double mean_rate = 0;
      for (const auto& point : profile) mean_rate += point.rate;
      mean_rate /= static_cast<double>(profile.size());
      delta_schedule = {0.2 * mean_rate, 0.1 * mean_rate, 0.05 * mean_rate};
    }
  }

  const double horizon = resolved.horizon_factor * std::max(upstream.time, 10 * resolved.dt) +
                         20.0 * body.bounding_radius() / resolved.fast_gain +
                         100.0 * resolved.dt;
  const auto membership = [&body](const Vector& x) { return body.contains(x); };
  const SimulationTarget target{y1, resolved.endpoint_tol};

  double best = std::numeric_limits<double>::infinity();
  std::vector<Trajectory> trajectories;
  for (const double delta : delta_schedule) {
    SynthesisConfig run = resolved;
    run.delta = delta;
    try {
      const ControlLaw law = make_law(system, body, y0, y1, profile, run);
      Trajectory traj = simulate(system, law, y0, horizon, resolved.dt, membership, target,
                                 body.bounding_radius());
      if (traj.feasible) best = std::min(best, traj.arrival_time);
      trajectories.push_back(std::move(traj));
    } catch (const SynthesisInfeasible&) {
      continue;
    } catch (const StepBlowup&) {
      continue;
    }
  }
  if (!std::isfinite(best))
    throw NoFeasibleRun("empirical_min_time: no delta in the schedule reached the target");
  return {best, std::move(trajectories)};
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::ostringstream out;
  const Eigen::Index n = trajectory.states.empty() ? 0 : trajectory.states.front().size();
  const Eigen::Index m = trajectory.controls.empty() ? 0 : trajectory.controls.front().size();
  out << "t";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",y" << i;
  for (Eigen::Index j = 1; j <= m; ++j) out << ",u" << j;
  out << ",inside\n";
  char buffer[40];
  const auto put = [&](double value) {
    std::snprintf(buffer, sizeof(buffer), "%.16e", value);
    out << buffer;
  };
  for (std::size_t row = 0; row < trajectory.times.size(); ++row) {
    put(trajectory.times[row]);
    for (Eigen::Index i = 0; i < n; ++i) {
      out << ',';
      put(trajectory.states[row][i]);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      out << ',';
      put(trajectory.controls[row][j]);
    }
    out << ',' << (trajectory.inside_flags[row] ? 1 : 0) << '\n';
  }
  return out.str();
}

void write_trajectory_csv(const Trajectory& trajectory, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot open trajectory output file: " + path);
  file << trajectory_csv(trajectory);
}

EquivalenceReport equivalence_check_1d(const ControlSystem& system, const ConvexBody& body,
                                       const Vector& y0, const Vector& y1,
                                       const SolverConfig& config) {
  EquivalenceReport report;
  const TimeResult upstream = min_time_codim1(system, body, y0, y1, config);
  report.status = upstream.status;
  if (upstream.status != ReachStatus::Finite) return report;

  report.theorem_time = upstream.time;
  SynthesisConfig synth;
  auto [best, trajectories] = empirical_min_time(system, body, y0, y1, synth, {}, config);
  (void)trajectories;
  report.best_sim_time = best;
  const double scale = std::max(upstream.time, 1e-12);
  report.gap_relative = (best - upstream.time) / scale;
  report.report_produced = true;
  report.sandwich_ok = best >= upstream.time - 1e-3 * scale;
  report.gap_ok = report.gap_relative <= config.sim_gap_tol;
  return report;
}

}  // namespace mintime
