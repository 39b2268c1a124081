#include "xflie/bench/scenario.hpp"

#include <fstream>

#include "xflie/bench/worlds.hpp"
#include "xflie/flie/errors.hpp"
#include "xflie/lsg/errors.hpp"
#include "xflie/sim/errors.hpp"

namespace xflie::bench {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::ConfigError: return "ConfigError";
    case Errc::MissingMetrics: return "MissingMetrics";
  }
  return "Unknown";
}

const char* to_string(PlannerMode m) {
  switch (m) {
    case PlannerMode::Lsg: return "lsg";
    case PlannerMode::Grid: return "grid";
    case PlannerMode::Both: return "both";
  }
  return "?";
}

PlannerMode planner_mode_from_string(const std::string& s) {
  if (s == "lsg") return PlannerMode::Lsg;
  if (s == "grid") return PlannerMode::Grid;
  if (s == "both") return PlannerMode::Both;
  throw Error(Errc::ConfigError, "planner must be lsg, grid or both, got '" + s + "'");
}

void apply_seed(ScenarioSpec& spec, std::uint64_t seed) {
  spec.seed = seed;
  spec.world.seed = seed;
  spec.mission.noise.seed = seed;
}

namespace {

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigError, path.string() + ": " + e.what());
  }
}

}  // namespace

ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  ScenarioSpec s;
  try {
    if (!j.is_object()) throw Error(Errc::ConfigError, "scenario must be an object");
    s.id = j.at("id").get<std::string>();
    s.mission = flie::mission_config_from_json(j.value("mission", nlohmann::json::object()));
    const auto& wj = j.at("world");
    if (wj.contains("generator")) {
      const auto gen = wj.at("generator").get<std::string>();
      if (gen != "ring") throw Error(Errc::ConfigError, "unknown world generator '" + gen + "'");
      const GeneratedWorld g = ring_world(wj.at("targets").get<int>());
      s.world = g.world;
      if (!j.value("mission", nlohmann::json::object()).contains("start")) {
        s.mission.start = g.start;
        s.mission.start_yaw = g.start_yaw;
      }
    } else if (wj.contains("file")) {
      s.world = sim::world_from_json(read_json(base_dir / wj.at("file").get<std::string>()));
    } else {
      s.world = sim::world_from_json(wj);
    }
    for (const auto& q : j.value("queries", nlohmann::json::array())) s.queries.push_back(q.get<std::string>());
    s.grid_resolution = j.value("grid_resolution", s.grid_resolution);
    if (!(s.grid_resolution > 0.0)) throw Error(Errc::ConfigError, "grid_resolution must be positive");
    s.planner = planner_mode_from_string(j.value("planner", std::string("both")));
    if (j.contains("out")) s.out_dir = j.at("out").get<std::string>();
    apply_seed(s, j.value("seed", std::uint64_t{0}));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::ConfigError, e.what());
  } catch (const flie::Error& e) {
    throw Error(Errc::ConfigError, e.what());
  } catch (const sim::Error& e) {
    throw Error(Errc::ConfigError, e.what());
  } catch (const lsg::Error& e) {
    throw Error(Errc::ConfigError, e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(Errc::ConfigError, e.what());
  }
  return s;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json(path), path.parent_path());
}

}  // namespace xflie::bench
