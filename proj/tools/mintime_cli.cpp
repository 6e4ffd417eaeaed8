#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mintime/scenario.hpp"

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw mintime::Error("cannot open output file: " + path.string());
  file << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimal controllability time: exact 1-D slow times, lower bounds, and "
               "simulation-verified control synthesis"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a scenario file and write result documents");
  std::string scenario_path;
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  std::string out_dir = ".";
  run->add_option("--out", out_dir, "output directory (created if missing)");
  bool traj = false;
  run->add_flag("--traj", traj, "also write trajectory.csv for synthesize requests");
  bool verify = false;
  run->add_flag("--verify", verify, "run the verify request regardless of the scenario's");
  double quad_tol = 0;
  run->add_option("--quad-tol", quad_tol, "override solver.quad_tol");
  long long seed = -1;
  run->add_option("--seed", seed, "override solver.seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    mintime::Scenario scenario = mintime::load_scenario(scenario_path);
    if (verify) scenario.request = mintime::RequestKind::verify;
    if (quad_tol > 0) scenario.solver.quad_tol = quad_tol;
    if (seed >= 0) scenario.solver.seed = static_cast<unsigned>(seed);

    const mintime::RunResult result = mintime::run_scenario(scenario, traj);

    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "result.json", result.result_json);
    write_file(dir / "rate_profile.csv", result.rate_profile_csv);
    if (!result.trajectory_csv.empty()) write_file(dir / "trajectory.csv", result.trajectory_csv);

    std::cout << result.result_json;
    return result.exit_code;
  } catch (const mintime::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const mintime::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
