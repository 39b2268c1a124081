#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "xflie/flie/params.hpp"
#include "xflie/sim/world.hpp"

namespace xflie::bench {

enum class Errc {
  ConfigError,
  MissingMetrics,
};

const char* to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

enum class PlannerMode { Lsg, Grid, Both };
const char* to_string(PlannerMode m);
PlannerMode planner_mode_from_string(const std::string& s);

struct ScenarioSpec {
  std::string id;
  sim::WorldSpec world;
  flie::MissionConfig mission;
  /// Operator queries replayed against the final graph, in order.
  std::vector<std::string> queries;
  std::uint64_t seed = 0;
  double grid_resolution = 0.7;
  PlannerMode planner = PlannerMode::Both;
  std::filesystem::path out_dir;
};

/// Applies the scenario seed to the world and the noise model.
void apply_seed(ScenarioSpec& spec, std::uint64_t seed);

/// `world` is either {"generator": "ring", "targets": N}, {"file": path}
/// (relative to `base_dir`) or an inline world document. Throws Error(ConfigError).
ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ScenarioSpec load_scenario(const std::filesystem::path& path);

}  // namespace xflie::bench
