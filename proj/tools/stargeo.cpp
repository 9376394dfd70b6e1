#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stargeo/error.hpp"
#include "stargeo/scenario.hpp"
#include "stargeo/verify.hpp"

namespace {

int exit_code_for(const stargeo::Error& e) { return stargeo::is_numerical(e.code()) ? 3 : 2; }

int run_verify(bool quick) {
  const auto results = stargeo::run_verify_suite(quick);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("[%s] %-12s %-48s value=%.3e tol=%.1e\n", r.pass ? "PASS" : "FAIL", r.suite.c_str(),
                r.name.c_str(), r.value, r.tolerance);
    failed += !r.pass;
  }
  std::printf("%zu checks, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Star-body regularizer geometry: figures and invariant checks"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  std::size_t grid = 0;
  auto* run = app.add_subcommand("run", "Run a scenario and write CSV, SVG and report.json");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output root directory")->required();
  auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
  auto* grid_opt = run->add_option("--grid", grid, "Override the sphere grid size")->check(CLI::Range(8, 1 << 22));

  bool quick = false;
  auto* verify = app.add_subcommand("verify", "Run the invariant suites");
  verify->add_flag("--quick", quick, "Fewer random trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      stargeo::RunOverrides ov;
      if (*seed_opt) ov.seed = seed;
      if (*grid_opt) ov.grid = grid;
      const auto outcome = stargeo::run_scenario_file(scenario_path, out_dir, ov);
      std::cout << "wrote " << outcome.out_dir << "\n";
      return 0;
    }
    return run_verify(quick);
  } catch (const stargeo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
