#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mintime/synthesis.hpp"

namespace mintime {

// Non-convex ring kept only as a raw membership predicate for simulation
// experiments; every theorem operation rejects it.
struct AnnulusSpec {
  Vector center;
  double inner_radius = 0;
  double outer_radius = 0;

  bool contains(const Vector& x, double tol = kMembershipTol) const {
    const double r = (x - center).norm();
    return r >= inner_radius - tol && r <= outer_radius + tol;
  }
};

enum class RequestKind { time, bound, synthesize, verify };

struct Scenario {
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  Matrix b;
  std::optional<DriftField> drift;
  std::optional<ConvexBody> body;
  std::optional<AnnulusSpec> annulus;
  Vector y0;
  Vector y1;
  SolverConfig solver;
  SynthesisConfig synthesis;
  std::vector<double> delta_schedule;
  RequestKind request = RequestKind::time;
  std::string paper_example;  // free-form label echoed into the result document

  ControlSystem make_system() const;
};

// Throws ParseError on malformed JSON, ValidationError (with a field path)
// on missing or inconsistent fields.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

struct RunResult {
  int exit_code = 0;
  std::string result_json;
  std::string rate_profile_csv;
  std::string trajectory_csv;  // nonempty only for synthesize/verify runs that produced one
};

// Executes the requested operation. Exit code 0 for Finite / finite bound,
// 2 for Unreachable (an infinite bound is an unreachability certificate),
// 3 for Indeterminate. Validation problems throw; the CLI maps them to 1.
RunResult run_scenario(const Scenario& scenario, bool include_trajectory = false);

std::string to_string(ReachStatus status);

}  // namespace mintime
