#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "stargeo/density.hpp"
#include "stargeo/starbody.hpp"

namespace stargeo {

enum class TaskKind {
  AdversarialFigure,
  HellingerFigure,
  AlphaSweep,
  ToyInverse,
  WeakConvexSweep,
  VerifySuite,
  ErmRun,
  TrainRun
};

/// Parsed and validated scenario. Densities stay as JSON until the grid
/// is known, since gauge-based kinds sample their bodies on it.
struct Scenario {
  std::string name;
  int dim = 2;
  std::size_t grid = 0;
  std::uint64_t seed = 0;
  TaskKind task = TaskKind::AdversarialFigure;
  nlohmann::json densities = nlohmann::json::object();
  nlohmann::json params = nlohmann::json::object();
};

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> grid;
};

/// Throws Error(ScenarioInvalid) on schema violations, including unknown keys.
Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

StarBody body_from_spec(const nlohmann::json& spec, const GridPtr& grid);
/// `context` resolves "base_from" references to already built densities.
DensityPtr density_from_spec(const nlohmann::json& spec, const GridPtr& grid,
                             const std::map<std::string, DensityPtr>& context = {});

struct ScenarioOutcome {
  std::string out_dir;
  nlohmann::json report;
};

/// Runs the task and writes bodies.csv, figure.svg and report.json (plus
/// task-specific extras) under out_root/name.
ScenarioOutcome run_scenario(const Scenario& s, const std::string& out_root,
                             const RunOverrides& overrides);
ScenarioOutcome run_scenario_file(const std::string& path, const std::string& out_root,
                                  const RunOverrides& overrides);

}  // namespace stargeo
