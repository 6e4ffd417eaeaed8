#include "mintime/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mintime {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

std::string joined(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& require_field(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key))
    throw ValidationError(joined(path, key), "required field is missing");
  return obj.at(key);
}

double as_number(const json& value, const std::string& path) {
  if (!value.is_number()) throw ValidationError(path, "expected a number");
  return value.get<double>();
}

double as_positive(const json& value, const std::string& path) {
  const double v = as_number(value, path);
  if (!(v > 0)) throw ValidationError(path, "expected a positive number");
  return v;
}

Eigen::Index as_dimension(const json& value, const std::string& path) {
  if (!value.is_number_integer() || value.get<long long>() <= 0)
    throw ValidationError(path, "expected a positive integer");
  return static_cast<Eigen::Index>(value.get<long long>());
}

std::string as_string(const json& value, const std::string& path) {
  if (!value.is_string()) throw ValidationError(path, "expected a string");
  return value.get<std::string>();
}

Vector as_vector(const json& value, Eigen::Index expected, const std::string& path) {
  if (!value.is_array()) throw ValidationError(path, "expected an array of numbers");
  if (expected >= 0 && static_cast<Eigen::Index>(value.size()) != expected)
    throw ValidationError(path, "expected " + std::to_string(expected) + " entries, got " +
                                    std::to_string(value.size()));
  Vector v(value.size());
  for (std::size_t i = 0; i < value.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = as_number(value[i], path + "[" + std::to_string(i) + "]");
  return v;
}

// Flat row-major array of length rows*cols.
Matrix as_matrix(const json& value, Eigen::Index rows, Eigen::Index cols,
                 const std::string& path) {
  if (!value.is_array()) throw ValidationError(path, "expected a flat row-major number array");
  if (static_cast<Eigen::Index>(value.size()) != rows * cols)
    throw ValidationError(path, "expected " + std::to_string(rows * cols) +
                                    " entries (row-major " + std::to_string(rows) + "x" +
                                    std::to_string(cols) + "), got " +
                                    std::to_string(value.size()));
  Matrix a(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const std::size_t flat = static_cast<std::size_t>(r * cols + c);
      a(r, c) = as_number(value[flat], path + "[" + std::to_string(flat) + "]");
    }
  return a;
}

DriftField parse_drift(const json& drift, Eigen::Index n) {
  const std::string kind = as_string(require_field(drift, "kind", "system.drift"),
                                     "system.drift.kind");
  try {
    if (kind == "linear")
      return DriftField::linear(
          as_matrix(require_field(drift, "a", "system.drift"), n, n, "system.drift.a"));
    if (kind == "constant")
      return DriftField::constant(
          as_vector(require_field(drift, "value", "system.drift"), n, "system.drift.value"));
    if (kind == "inverse-square-attraction")
      return DriftField::inverse_square_attraction(
          as_vector(require_field(drift, "source", "system.drift"), n, "system.drift.source"));
    if (kind == "axis-weighted-attraction")
      return DriftField::axis_weighted_attraction(
          as_vector(require_field(drift, "source", "system.drift"), n, "system.drift.source"),
          as_vector(require_field(drift, "axis", "system.drift"), n, "system.drift.axis"));
    if (kind == "piecewise-counterexample") {
      if (n != 3)
        throw ValidationError("system.drift.kind", "piecewise-counterexample requires n = 3");
      return DriftField::piecewise_counterexample();
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError("system.drift", e.what());
  }
  throw ValidationError("system.drift.kind", "unknown drift kind '" + kind + "'");
}

void parse_body(const json& body, Scenario& sc) {
  const std::string kind = as_string(require_field(body, "kind", "body"), "body.kind");
  try {
    if (kind == "box") {
      sc.body = ConvexBody::box(as_vector(require_field(body, "lower", "body"), sc.n, "body.lower"),
                                as_vector(require_field(body, "upper", "body"), sc.n, "body.upper"));
    } else if (kind == "ellipsoid") {
      sc.body = ConvexBody::ellipsoid(
          as_vector(require_field(body, "center", "body"), sc.n, "body.center"),
          as_matrix(require_field(body, "shape", "body"), sc.n, sc.n, "body.shape"));
    } else if (kind == "polytope") {
      const Vector offsets =
          as_vector(require_field(body, "offsets", "body"), -1, "body.offsets");
      const Matrix normals =
          as_matrix(require_field(body, "normals", "body"), offsets.size(), sc.n, "body.normals");
      sc.body = ConvexBody::polytope(normals, offsets);
    } else if (kind == "annulus") {
      AnnulusSpec spec;
      spec.center = as_vector(require_field(body, "center", "body"), sc.n, "body.center");
      spec.inner_radius = as_positive(require_field(body, "inner_radius", "body"),
                                      "body.inner_radius");
      spec.outer_radius = as_positive(require_field(body, "outer_radius", "body"),
                                      "body.outer_radius");
      if (spec.outer_radius <= spec.inner_radius)
        throw ValidationError("body.outer_radius", "must exceed body.inner_radius");
      sc.annulus = spec;
    } else {
      throw ValidationError("body.kind", "unknown body kind '" + kind + "'");
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError("body", e.what());
  }
}

void parse_solver(const json& solver, Scenario& sc) {
  if (solver.contains("quad_tol"))
    sc.solver.quad_tol = as_positive(solver.at("quad_tol"), "solver.quad_tol");
  if (solver.contains("rate_sign_tol"))
    sc.solver.rate_sign_tol_scale = as_positive(solver.at("rate_sign_tol"), "solver.rate_sign_tol");
  if (solver.contains("grid")) {
    const Eigen::Index grid = as_dimension(solver.at("grid"), "solver.grid");
    if (grid < 2) throw ValidationError("solver.grid", "expected at least 2");
    sc.solver.grid = static_cast<int>(grid);
  }
  if (solver.contains("seed")) {
    const json& seed = solver.at("seed");
    if (!seed.is_number_integer() || seed.get<long long>() < 0)
      throw ValidationError("solver.seed", "expected a nonnegative integer");
    sc.solver.seed = static_cast<unsigned>(seed.get<long long>());
  }
  if (solver.contains("multistart"))
    sc.solver.multistart =
        static_cast<int>(as_dimension(solver.at("multistart"), "solver.multistart"));
  if (solver.contains("sim_gap_tol"))
    sc.solver.sim_gap_tol = as_positive(solver.at("sim_gap_tol"), "solver.sim_gap_tol");
  if (solver.contains("delta"))
    sc.synthesis.delta = as_positive(solver.at("delta"), "solver.delta");
  if (solver.contains("dt")) sc.synthesis.dt = as_positive(solver.at("dt"), "solver.dt");
  if (solver.contains("fast_gain"))
    sc.synthesis.fast_gain = as_positive(solver.at("fast_gain"), "solver.fast_gain");
  if (solver.contains("endpoint_tol"))
    sc.synthesis.endpoint_tol = as_positive(solver.at("endpoint_tol"), "solver.endpoint_tol");
  if (solver.contains("delta_schedule")) {
    const json& schedule = solver.at("delta_schedule");
    if (!schedule.is_array() || schedule.empty())
      throw ValidationError("solver.delta_schedule", "expected a nonempty array");
    for (std::size_t i = 0; i < schedule.size(); ++i)
      sc.delta_schedule.push_back(
          as_positive(schedule[i], "solver.delta_schedule[" + std::to_string(i) + "]"));
  }
}

std::string csv_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.16e", value);
  return buffer;
}

ordered number_or_null(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

ordered profile_table(const std::vector<ProfilePoint>& profile) {
  ordered rows = ordered::array();
  for (const auto& point : profile) rows.push_back(ordered::array({point.arc_position, point.rate}));
  return rows;
}

std::string profile_csv(const std::vector<ProfilePoint>& profile) {
  std::string out = "arc_position,rate\n";
  for (const auto& point : profile)
    out += csv_number(point.arc_position) + "," + csv_number(point.rate) + "\n";
  return out;
}

int status_exit_code(ReachStatus status) {
  switch (status) {
    case ReachStatus::Finite: return 0;
    case ReachStatus::Unreachable: return 2;
    case ReachStatus::Indeterminate: return 3;
  }
  return 1;
}

void fill_time_fields(ordered& doc, const TimeResult& result) {
  doc["status"] = to_string(result.status);
  doc["time"] =
      result.status == ReachStatus::Finite ? number_or_null(result.time) : ordered(nullptr);
  doc["min_rate"] = number_or_null(result.min_rate_found);
  doc["argmin_arc_position"] = result.argmin_arc_position;
  doc["quadrature_error_estimate"] = number_or_null(result.quadrature_error_estimate);
  doc["rate_sign_tol"] = result.rate_sign_tol;
  doc["arc_length"] = result.arc_length;
}

}  // namespace

std::string to_string(ReachStatus status) {
  switch (status) {
    case ReachStatus::Finite: return "Finite";
    case ReachStatus::Unreachable: return "Unreachable";
    case ReachStatus::Indeterminate: return "Indeterminate";
  }
  return "Unknown";
}

ControlSystem Scenario::make_system() const {
  if (!drift) throw Error("scenario carries no drift field");
  return ControlSystem(b, *drift);
}

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const std::exception& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what());
  }
  if (!root.is_object()) throw ValidationError("", "scenario must be a JSON object");

  Scenario sc;
  const json& system = require_field(root, "system", "");
  sc.n = as_dimension(require_field(system, "n", "system"), "system.n");
  sc.m = as_dimension(require_field(system, "m", "system"), "system.m");
  if (sc.m > sc.n)
    throw ValidationError("system.m", "control dimension exceeds state dimension");
  sc.b = as_matrix(require_field(system, "B", "system"), sc.n, sc.m, "system.B");
  sc.drift = parse_drift(require_field(system, "drift", "system"), sc.n);

  parse_body(require_field(root, "body", ""), sc);
  sc.y0 = as_vector(require_field(root, "y0", ""), sc.n, "y0");
  sc.y1 = as_vector(require_field(root, "y1", ""), sc.n, "y1");

  if (root.contains("solver")) {
    if (!root.at("solver").is_object()) throw ValidationError("solver", "expected an object");
    parse_solver(root.at("solver"), sc);
  }

  const std::string request = as_string(require_field(root, "request", ""), "request");
  if (request == "time") sc.request = RequestKind::time;
  else if (request == "bound") sc.request = RequestKind::bound;
  else if (request == "synthesize") sc.request = RequestKind::synthesize;
  else if (request == "verify") sc.request = RequestKind::verify;
  else throw ValidationError("request", "must be one of time|bound|synthesize|verify");

  if (root.contains("paper_example"))
    sc.paper_example = as_string(root.at("paper_example"), "paper_example");

  // Rank and dimension checks that need the actual objects.
  try {
    (void)sc.make_system();
  } catch (const Error& e) {
    throw ValidationError("system.B", e.what());
  }
  if (sc.body && sc.body->dimension() != sc.n)
    throw ValidationError("body", "body dimension does not match system.n");
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ParseError("cannot open scenario file: " + path);
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_scenario(buffer.str());
}

RunResult run_scenario(const Scenario& scenario, bool include_trajectory) {
  if (scenario.annulus)
    throw NonConvexBody(
        "annulus body rejected: theorem operations assume a bounded convex state constraint, "
        "and an annulus is not convex");
  if (!scenario.body || !scenario.drift)
    throw ValidationError("body", "scenario is missing a body or drift");

  const ControlSystem system = scenario.make_system();
  const ConvexBody& body = *scenario.body;

  RunResult out;
  ordered doc;
  if (!scenario.paper_example.empty()) doc["paper_example"] = scenario.paper_example;
  switch (scenario.request) {
    case RequestKind::time: doc["request"] = "time"; break;
    case RequestKind::bound: doc["request"] = "bound"; break;
    case RequestKind::synthesize: doc["request"] = "synthesize"; break;
    case RequestKind::verify: doc["request"] = "verify"; break;
  }
  doc["seed"] = scenario.solver.seed;

  switch (scenario.request) {
    case RequestKind::time: {
      const TimeResult result =
          min_time_codim1(system, body, scenario.y0, scenario.y1, scenario.solver);
      fill_time_fields(doc, result);
      out.exit_code = status_exit_code(result.status);
      break;
    }
    case RequestKind::bound: {
      const LowerBound bound =
          min_time_lower_bound(system, body, scenario.y0, scenario.y1, scenario.solver);
      doc["status"] = bound.infinite ? "Unreachable" : "LowerBound";
      doc["bound"] = bound.infinite ? ordered(nullptr) : number_or_null(bound.bound);
      doc["bound_infinite"] = bound.infinite;
      doc["min_rate"] = number_or_null(bound.rate_min);
      doc["argmin_arc_position"] = bound.argmin_arc_position;
      doc["quadrature_error_estimate"] = number_or_null(bound.quadrature_error_estimate);
      doc["arc_length"] = bound.arc_length;
      out.exit_code = bound.infinite ? 2 : 0;
      break;
    }
    case RequestKind::synthesize: {
      const TimeResult result =
          min_time_codim1(system, body, scenario.y0, scenario.y1, scenario.solver);
      fill_time_fields(doc, result);
      out.exit_code = status_exit_code(result.status);
      if (result.status == ReachStatus::Finite) {
        auto [best, trajectories] =
            empirical_min_time(system, body, scenario.y0, scenario.y1, scenario.synthesis,
                               scenario.delta_schedule, scenario.solver);
        doc["best_time"] = best;
        if (include_trajectory) {
          for (const auto& trajectory : trajectories) {
            if (trajectory.feasible && trajectory.arrival_time == best) {
              out.trajectory_csv = trajectory_csv(trajectory);
              doc["trajectory_csv"] = "trajectory.csv";
              break;
            }
          }
        }
      }
      break;
    }
    case RequestKind::verify: {
      const EquivalenceReport report =
          equivalence_check_1d(system, body, scenario.y0, scenario.y1, scenario.solver);
      doc["status"] = to_string(report.status);
      ordered verify;
      verify["report_produced"] = report.report_produced;
      verify["theorem_time"] = number_or_null(report.theorem_time);
      verify["best_sim_time"] = number_or_null(report.best_sim_time);
      verify["gap_relative"] = number_or_null(report.gap_relative);
      verify["sandwich_ok"] = report.sandwich_ok;
      verify["gap_ok"] = report.gap_ok;
      doc["verify"] = verify;
      out.exit_code = status_exit_code(report.status);
      break;
    }
  }

  const Vector h0 = system.slow_projection(scenario.y0);
  const Vector h1 = system.slow_projection(scenario.y1);
  const RateMode mode = scenario.request == RequestKind::bound ? RateMode::general_lower_bound
                                                               : RateMode::codim1;
  std::vector<ProfilePoint> profile;
  if ((h1 - h0).norm() > 1e-12 &&
      (mode == RateMode::general_lower_bound || system.slow_dimension() == 1))
    profile = rate_profile(system, body, h0, h1, mode, std::max(2, scenario.solver.grid),
                           scenario.solver.rate_options());
  doc["rate_profile"] = profile_table(profile);
  out.rate_profile_csv = profile_csv(profile);
  out.result_json = doc.dump(2) + "\n";
  return out;
}

}  // namespace mintime
