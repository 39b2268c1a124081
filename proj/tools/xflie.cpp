#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xflie/bench/metrics.hpp"
#include "xflie/bench/runner.hpp"
#include "xflie/bench/scenario.hpp"
#include "xflie/bench/worlds.hpp"
#include "xflie/hpp/errors.hpp"
#include "xflie/hpp/planner.hpp"
#include "xflie/lsg/errors.hpp"
#include "xflie/lsg/serialize.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kAborted = 2;
constexpr int kConfigError = 3;

using namespace xflie;

struct RunArgs {
  std::string scenario;
  std::string world;
  std::optional<std::uint64_t> seed;
  std::string planner;
  bool naive_edges = false;
  std::string similarity_norm;
  std::optional<double> grid_resolution;
  std::string out;
};

bench::RunOptions options_from(const RunArgs& a) {
  bench::RunOptions o;
  o.seed = a.seed;
  if (!a.planner.empty()) o.planner = bench::planner_mode_from_string(a.planner);
  if (a.naive_edges) o.naive_edges = true;
  if (!a.similarity_norm.empty()) {
    try {
      o.similarity_norm = flie::similarity_norm_from_string(a.similarity_norm);
    } catch (const std::exception& e) {
      throw bench::Error(bench::Errc::ConfigError, e.what());
    }
  }
  o.grid_resolution = a.grid_resolution;
  if (!a.out.empty()) o.out_dir = a.out;
  return o;
}

int cmd_run(const RunArgs& a) {
  auto spec = bench::load_scenario(a.scenario);
  if (!a.world.empty()) {
    std::ifstream in(a.world);
    if (!in) throw bench::Error(bench::Errc::ConfigError, "cannot read " + a.world);
    try {
      const auto j = nlohmann::json::parse(in);
      spec.world = sim::world_from_json(j);
      if (j.contains("suggested_start")) {
        const auto& s = j.at("suggested_start");
        spec.mission.start = {s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()};
        spec.mission.start_yaw = 0.0;
      }
      bench::apply_seed(spec, spec.seed);
    } catch (const nlohmann::json::exception& e) {
      throw bench::Error(bench::Errc::ConfigError, a.world + ": " + e.what());
    }
  }
  auto opts = options_from(a);
  const auto res = bench::run_scenario(spec, opts);
  std::cout << res.id << ": inspected " << res.inspected << "/" << res.world_targets << ", detected " << res.detected
            << ", nodes " << res.nodes << ", edges " << res.edges << ", plans " << res.rows.size() << " metric rows\n";
  for (const auto& e : res.query_errors) std::cerr << "query failed: " << e << "\n";
  if (res.aborted) {
    std::cerr << "mission aborted: " << res.abort_reason << "\n";
    return kAborted;
  }
  return kOk;
}

int cmd_compare(const std::vector<std::string>& scenarios, const std::vector<std::string>& metrics,
                const RunArgs& a) {
  std::vector<bench::MetricsRow> rows;
  const std::filesystem::path out = a.out.empty() ? std::filesystem::path(".") : std::filesystem::path(a.out);
  for (const auto& path : scenarios) {
    const auto spec = bench::load_scenario(path);
    auto opts = options_from(a);
    opts.planner = bench::PlannerMode::Both;
    opts.out_dir = out / spec.id;
    const auto res = bench::run_scenario(spec, opts);
    if (res.aborted) {
      std::cerr << spec.id << ": mission aborted: " << res.abort_reason << "\n";
      return kAborted;
    }
    rows.insert(rows.end(), res.rows.begin(), res.rows.end());
  }
  for (const auto& path : metrics) {
    auto r = bench::read_metrics_csv(path);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  const auto report = bench::compare_planners(rows);
  std::filesystem::create_directories(out);
  bench::write_comparison_csv(out / "comparison.csv", report);
  const std::string table = bench::format_summary_table(report);
  std::ofstream(out / "comparison.txt") << table;
  std::cout << table;
  return kOk;
}

int cmd_plan(const std::string& graph_path, const std::string& query, const std::vector<double>& pose,
             const std::string& metrics) {
  const auto g = lsg::load(graph_path);
  Eigen::Vector3d x = g.root().pose.position;
  if (pose.size() == 3) x = {pose[0], pose[1], pose[2]};
  const auto r = hpp::plan(g, x, hpp::parse_query(query));
  std::cout << hpp::to_json(r).dump(2) << "\n";
  if (!metrics.empty()) {
    std::vector<bench::MetricsRow> rows;
    if (std::filesystem::exists(metrics)) rows = bench::read_metrics_csv(metrics);
    const std::string scenario = std::filesystem::path(graph_path).stem().stem().string();
    const auto id = "plan-" + std::to_string(rows.size());
    const auto added = bench::lsg_rows(scenario, {id, query, x, r.terminal, r});
    rows.insert(rows.end(), added.begin(), added.end());
    bench::write_metrics_csv(std::filesystem::path(metrics), rows);
  }
  return kOk;
}

int cmd_gen_world(int targets, std::uint64_t seed, const std::string& out) {
  const auto g = bench::ring_world(targets, seed);
  nlohmann::ordered_json j = sim::to_json(g.world);
  j["suggested_start"] = {g.start.x(), g.start.y(), g.start.z()};
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream(out) << j.dump(2) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered semantic graph inspection simulator and planner benchmark"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a scenario and write its artifacts");
  run->add_option("--scenario", run_args.scenario, "Scenario JSON file")->required()->envname("XFLIE_SCENARIO");
  run->add_option("--world", run_args.world, "World file replacing the scenario world")->envname("XFLIE_WORLD");
  run->add_option("--seed", run_args.seed, "Override the scenario seed")->envname("XFLIE_SEED");
  run->add_option("--planner", run_args.planner, "lsg, grid or both")->envname("XFLIE_PLANNER");
  run->add_flag("--naive-edges", run_args.naive_edges, "Connect every target to the root when planning")
      ->envname("XFLIE_NAIVE_EDGES");
  run->add_option("--similarity-norm", run_args.similarity_norm, "set or none")->envname("XFLIE_SIMILARITY_NORM");
  run->add_option("--grid-resolution", run_args.grid_resolution, "Grid baseline cell size in metres")
      ->envname("XFLIE_GRID_RESOLUTION");
  run->add_option("--out", run_args.out, "Output directory")->required()->envname("XFLIE_OUT");

  RunArgs cmp_args;
  std::vector<std::string> cmp_scenarios;
  std::vector<std::string> cmp_metrics;
  auto* cmp = app.add_subcommand("compare", "Compare LSG and grid planning over several scenarios");
  cmp->add_option("--scenario", cmp_scenarios, "Scenario files to run with both planners");
  cmp->add_option("--metrics", cmp_metrics, "Existing metrics.csv files");
  cmp->add_option("--seed", cmp_args.seed, "Override the scenario seed")->envname("XFLIE_SEED");
  cmp->add_flag("--naive-edges", cmp_args.naive_edges, "Connect every target to the root when planning")
      ->envname("XFLIE_NAIVE_EDGES");
  cmp->add_option("--grid-resolution", cmp_args.grid_resolution, "Grid baseline cell size in metres")
      ->envname("XFLIE_GRID_RESOLUTION");
  cmp->add_option("--out", cmp_args.out, "Output directory")->envname("XFLIE_OUT");

  std::string graph_path;
  std::string query;
  std::vector<double> pose;
  std::string plan_metrics;
  auto* plan = app.add_subcommand("plan", "Plan a query over a saved graph and print the result");
  plan->add_option("--graph", graph_path, "Graph document (.lsg.json)")->required();
  plan->add_option("--query", query, "e.g. \"Visit front bumper-1 in Level-0 of car-0\"")->required();
  plan->add_option("--pose", pose, "Start position x,y,z (defaults to the root pose)")
      ->delimiter(',')
      ->expected(3);
  plan->add_option("--metrics", plan_metrics, "Append metric rows to this CSV");

  int targets = 4;
  std::uint64_t world_seed = 0;
  std::string world_out;
  auto* gen = app.add_subcommand("gen-world", "Write a ring world of vehicles");
  gen->add_option("--targets", targets, "Number of vehicles")->required();
  gen->add_option("--seed", world_seed, "World seed");
  gen->add_option("--out", world_out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*cmp) return cmd_compare(cmp_scenarios, cmp_metrics, cmp_args);
    if (*plan) return cmd_plan(graph_path, query, pose, plan_metrics);
    if (*gen) return cmd_gen_world(targets, world_seed, world_out);
  } catch (const bench::Error& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const lsg::Error& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  } catch (const hpp::Error& e) {
    std::cerr << e.what();
    std::cerr << "\n";
    return kAborted;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kConfigError;
  }
  return kOk;
}
