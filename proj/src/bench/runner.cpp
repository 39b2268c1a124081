#include "xflie/bench/runner.hpp"

#include <cctype>
#include <fstream>

#include "xflie/hpp/errors.hpp"
#include "xflie/lsg/serialize.hpp"

namespace xflie::bench {

GridRecorder::GridRecorder(std::string scenario, const sim::WorldSpec& world, const sim::CameraModel& cam,
                           double resolution, int timing_repeats)
    : scenario_(std::move(scenario)),
      world_(world),
      cam_(cam),
      grid_(grid::OccupancyGrid::covering(world.bounds, resolution)),
      repeats_(timing_repeats) {}

void GridRecorder::on_frame(const sim::RobotState& robot) { grid::update_occupancy(grid_, robot, world_, cam_); }

void GridRecorder::on_move(std::span<const lsg::Pose6> trace) { grid::mark_trace(grid_, trace); }

void GridRecorder::on_plan(const std::string& query_id, const Eigen::Vector3d& from, const Eigen::Vector3d& to,
                           const hpp::PlanResult& /*plan*/) {
  MetricsRow row{scenario_, "grid", query_id, "grid", grid_.traversable_edges(), 0.0, 0.0, false};
  try {
    const auto r = grid::grid_plan(grid_, from.head<2>(), to.head<2>(), repeats_);
    row.plan_time_s = r.plan_time_s;
    row.length_m = r.length;
    row.ok = true;
  } catch (const grid::Error&) {
    row.ok = false;
  }
  rows_.push_back(std::move(row));
}

std::vector<MetricsRow> lsg_rows(const std::string& scenario, const flie::PlanRecord& record) {
  std::vector<MetricsRow> rows;
  const auto& r = record.result;
  MetricsRow total{scenario, "lsg", record.query_id, "query", 0, 0.0, 0.0, true};
  if (r.global) {
    rows.push_back({scenario, "lsg", record.query_id, "target", r.global->exposed_edges, r.global->plan_time_s,
                    r.global->cost, true});
    total.edges_exposed += r.global->exposed_edges;
    total.plan_time_s += r.global->plan_time_s;
  }
  for (const auto& s : r.segments) {
    if (!s.searched) continue;
    std::string layer = lsg::to_string(s.layer);
    for (auto& c : layer) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    rows.push_back({scenario, "lsg", record.query_id, layer, s.exposed_edges, s.plan_time_s, s.length, true});
    total.edges_exposed += s.exposed_edges;
    total.plan_time_s += s.plan_time_s;
  }
  total.length_m = (r.start - record.from).norm() + r.total_length;
  rows.push_back(total);
  return rows;
}

namespace {

void write_artifacts(const std::filesystem::path& dir, const flie::Mission& m, const ScenarioResult& res,
                     const GridRecorder* grid) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream log(dir / "mission_log.jsonl");
    for (const auto& e : m.events()) log << e.dump() << "\n";
  }
  lsg::save(m.graph(), dir / "graph.lsg.json");
  write_metrics_csv(dir / "metrics.csv", res.rows);
  if (grid != nullptr) grid::export_pgm(grid->grid(), dir / "grid.pgm");
  nlohmann::ordered_json summary{{"scenario", res.id},
                                 {"aborted", res.aborted},
                                 {"abort_reason", res.abort_reason},
                                 {"world_targets", res.world_targets},
                                 {"inspected", res.inspected},
                                 {"detected", res.detected},
                                 {"nodes", res.nodes},
                                 {"edges", res.edges},
                                 {"sim_time_s", res.sim_time_s},
                                 {"gamma_evaluations", res.stats.gamma_evaluations},
                                 {"invariant_violations", res.stats.invariant_violations},
                                 {"query_errors", res.query_errors}};
  std::ofstream out(dir / "summary.json");
  out << summary.dump(2) << "\n";
}

}  // namespace

ScenarioResult run_scenario(ScenarioSpec spec, const RunOptions& options) {
  if (options.seed) apply_seed(spec, *options.seed);
  if (options.planner) spec.planner = *options.planner;
  if (options.naive_edges) spec.mission.naive_edges = *options.naive_edges;
  if (options.similarity_norm) spec.mission.similarity_norm = *options.similarity_norm;
  if (options.grid_resolution) spec.grid_resolution = *options.grid_resolution;
  const std::filesystem::path out_dir = options.out_dir.value_or(spec.out_dir);

  ScenarioResult res;
  res.id = spec.id;
  res.world_targets = spec.world.targets.size();

  std::optional<GridRecorder> grid;
  if (spec.planner != PlannerMode::Lsg) grid.emplace(spec.id, spec.world, spec.mission.camera, spec.grid_resolution,
                 spec.mission.timing_repeats);
  flie::Mission mission(spec.world, spec.mission, grid ? &*grid : nullptr);

  try {
    mission.run();
    for (std::size_t i = 0; i < spec.queries.size(); ++i) {
      const std::string qid = "q" + std::to_string(i);
      try {
        res.query_plans.push_back(mission.execute_query(spec.queries[i], qid));
        res.query_end_poses.push_back(mission.state().robot.pose);
      } catch (const hpp::Error& e) {
        std::string msg = qid + ": " + e.what();

        res.query_errors.push_back(msg);
      }
    }
  } catch (const std::exception& e) {
    res.aborted = true;
    res.abort_reason = e.what();
  }

  if (spec.planner != PlannerMode::Grid) {
    for (const auto& p : mission.plans()) {
      auto rows = lsg_rows(spec.id, p);
      res.rows.insert(res.rows.end(), rows.begin(), rows.end());
    }
  }
  if (grid) res.rows.insert(res.rows.end(), grid->rows().begin(), grid->rows().end());

  for (const auto& t : mission.graph().targets()) (t.inspected() ? res.inspected : res.detected)++;
  res.nodes = mission.graph().node_count();
  res.edges = mission.graph().edge_count();
  res.stats = mission.stats();
  res.sim_time_s = mission.state().time;
  res.graph_document = lsg::serialize(mission.graph());
  if (options.write_artifacts && !out_dir.empty()) write_artifacts(out_dir, mission, res, grid ? &*grid : nullptr);
  return res;
}

}  // namespace xflie::bench
