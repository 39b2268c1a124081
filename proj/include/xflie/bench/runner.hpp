#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xflie/bench/metrics.hpp"
#include "xflie/bench/scenario.hpp"
#include "xflie/flie/mission.hpp"
#include "xflie/grid/occupancy.hpp"

namespace xflie::bench {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<PlannerMode> planner;
  std::optional<bool> naive_edges;
  std::optional<flie::SimilarityNorm> similarity_norm;
  std::optional<double> grid_resolution;
  /// Write artifacts to spec.out_dir (or `out_dir` when set).
  bool write_artifacts = true;
  std::optional<std::filesystem::path> out_dir;
};

/// Feeds camera frames and trajectories into an occupancy grid and runs
/// grid_plan for every LSG plan request, recording one row each.
class GridRecorder : public flie::MissionObserver {
 public:
  GridRecorder(std::string scenario, const sim::WorldSpec& world, const sim::CameraModel& cam, double resolution,
               int timing_repeats = 1);

  void on_frame(const sim::RobotState& robot) override;
  void on_move(std::span<const lsg::Pose6> trace) override;
  void on_plan(const std::string& query_id, const Eigen::Vector3d& from, const Eigen::Vector3d& to,
               const hpp::PlanResult& plan) override;

  const grid::OccupancyGrid& grid() const { return grid_; }
  const std::vector<MetricsRow>& rows() const { return rows_; }

 private:
  std::string scenario_;
  sim::WorldSpec world_;
  sim::CameraModel cam_;
  grid::OccupancyGrid grid_;
  int repeats_;
  std::vector<MetricsRow> rows_;
};

/// Rows for one LSG plan: one per Dijkstra call plus a "query" aggregate.
std::vector<MetricsRow> lsg_rows(const std::string& scenario, const flie::PlanRecord& record);

struct ScenarioResult {
  std::string id;
  std::string graph_document;
  flie::MissionStats stats;
  std::vector<MetricsRow> rows;
  std::size_t inspected = 0;
  std::size_t detected = 0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t world_targets = 0;
  bool aborted = false;
  std::string abort_reason;
  std::vector<std::string> query_errors;
  std::vector<flie::PlanRecord> query_plans;
  /// Robot pose after each replayed query.
  std::vector<lsg::Pose6> query_end_poses;
  double sim_time_s = 0.0;
};

/// Runs the mission, then the query script. Module errors during the mission
/// stop the run with `aborted` set; artifacts written so far are kept.
ScenarioResult run_scenario(ScenarioSpec spec, const RunOptions& options = {});

}  // namespace xflie::bench
