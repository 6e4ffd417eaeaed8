#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mintime/mintime.hpp"

namespace mintime {

struct SynthesisConfig {
  // Zeros mean "derive from the problem": delta from the mean profile rate,
  // fast_gain from max |F| over the body, dt from diameter and closed-loop
  // speed, endpoint_tol from the bounding radius.
  double delta = 0;
  double fast_gain = 0;
  double dt = 0;
  double endpoint_tol = 0;
  int profile_grid = 257;
  double horizon_factor = 3.0;
};

// Resolved copy of a SynthesisConfig with every auto field filled in.
SynthesisConfig resolve_synthesis_config(const ControlSystem& system, const ConvexBody& body,
                                         const std::vector<ProfilePoint>& profile,
                                         SynthesisConfig config);

class ControlLaw {
 public:
  using Fn = std::function<Vector(double, const Vector&)>;
  explicit ControlLaw(Fn fn) : fn_(std::move(fn)) {}
  Vector operator()(double t, const Vector& y) const { return fn_(t, y); }

 private:
  Fn fn_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> controls;
  std::vector<bool> inside_flags;
  double terminal_error = std::numeric_limits<double>::quiet_NaN();
  bool all_inside = false;
  bool reached = false;  // target armed and hit within endpoint_tol
  bool feasible = false; // all_inside, and reached whenever a target was armed
  double arrival_time = std::numeric_limits<double>::quiet_NaN();
};

struct SimulationTarget {
  Vector y1;
  double endpoint_tol = 0;
};

// Feedback law for the one-slow-direction Finite case. One formula covers the
// three phases: fast approach onto the delta-shrunk per-slice maximizer curve,
// cruise tracking it while the slow coordinate advances at up to rate - O(delta),
// and a terminal capture that redirects the fast components at y1 once the
// remaining slow distance matches the drift accumulated during the dive.
// Maximizer-curve jumps ride the same saturation at fast_gain, which is the
// finite-amplitude version of the reconnection impulses.
ControlLaw synthesize_control(const ControlSystem& system, const ConvexBody& body,
                              const Vector& y0, const Vector& y1, const SynthesisConfig& config,
                              const SolverConfig& solver = {});

// Fixed-step RK4 on dy/dt = F(y) + B u(t, y). Stops at the first membership
// failure, at target capture when armed, or at the horizon. Raises StepBlowup
// when |y| exceeds 10x blowup_radius.
Trajectory simulate(const ControlSystem& system, const ControlLaw& law, const Vector& y0,
                    double horizon, double dt,
                    const std::function<bool(const Vector&)>& membership,
                    const std::optional<SimulationTarget>& target = std::nullopt,
                    double blowup_radius = std::numeric_limits<double>::infinity());

// Synthesize + simulate across a decreasing delta schedule; best feasible
// arrival time is the upper oracle for the time integral.
std::pair<double, std::vector<Trajectory>> empirical_min_time(
    const ControlSystem& system, const ConvexBody& body, const Vector& y0, const Vector& y1,
    SynthesisConfig config, std::vector<double> delta_schedule = {},
    const SolverConfig& solver = {});

// CSV rows `t,y1..yn,u1..um,inside`, floats with 17 significant digits.
void write_trajectory_csv(const Trajectory& trajectory, const std::string& path);
std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace mintime
