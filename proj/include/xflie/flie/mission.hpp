#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "xflie/flie/params.hpp"
#include "xflie/flie/similarity.hpp"
#include "xflie/hpp/planner.hpp"
#include "xflie/lsg/graph.hpp"
#include "xflie/sim/world.hpp"

namespace xflie::flie {

enum class Policy { Idle, Survey360, Inspect, LocalExplore, Transit, Query };

const char* to_string(Policy p);

struct MissionState {
  sim::RobotState robot;
  Policy policy = Policy::Idle;
  lsg::NodeId current_target = 0;
  lsg::NodeId current_level = 0;
  lsg::NodeId current_pose = 0;
  /// Simulated seconds: 1 m/s travel plus 0.1 s per camera frame.
  double time = 0.0;
  std::size_t frames = 0;
};

/// Hooks for attaching external consumers (the grid baseline) to a run.
class MissionObserver {
 public:
  virtual ~MissionObserver() = default;
  virtual void on_frame(const sim::RobotState& /*robot*/) {}
  virtual void on_move(std::span<const lsg::Pose6> /*trace*/) {}
  virtual void on_plan(const std::string& /*query_id*/, const Eigen::Vector3d& /*from*/,
                       const Eigen::Vector3d& /*to*/, const hpp::PlanResult& /*plan*/) {}
};

struct PlanRecord {
  std::string query_id;
  std::string query;
  Eigen::Vector3d from = Eigen::Vector3d::Zero();
  Eigen::Vector3d to = Eigen::Vector3d::Zero();
  hpp::PlanResult result;
};

struct LevelSummary {
  lsg::NodeId target = 0;
  std::uint32_t level = 0;
  /// View-poses in one full circuit.
  int circuit_poses = 0;
  /// Index of the pose at which the level closed.
  int closing_index = 0;
  bool failsafe = false;
};

struct MissionStats {
  std::size_t gamma_evaluations = 0;
  std::size_t gamma_out_of_range = 0;
  std::size_t gamma_gate_violations = 0;
  std::size_t target_graph_checks = 0;
  std::size_t pf_graph_checks = 0;
  std::size_t invariant_violations = 0;
  std::vector<LevelSummary> levels;
};

class Mission {
 public:
  Mission(sim::WorldSpec world, MissionConfig config, MissionObserver* observer = nullptr);

  /// Initial 360 degree survey; registers consistent detections and optimizes G_T.
  std::vector<lsg::NodeId> survey_360();

  /// Inspection policy for a Detected target. Throws Error(TargetLost) and
  /// leaves the node Detected when no matching object is found.
  void inspect(lsg::NodeId target);

  /// Sweeps from Level-0 stations of an inspected target, validating new
  /// detections against inspected polygons, then optimizes G_T.
  std::vector<lsg::NodeId> local_explore(lsg::NodeId inspected);

  std::vector<lsg::NodeId> optimize();
  std::optional<lsg::NodeId> select();

  /// Plans with the hierarchical planner toward `target` and flies the result.
  void travel_to(lsg::NodeId target);

  /// Whole explore-inspect loop until no Detected nodes remain.
  void run();

  /// Parses, plans and flies an operator query against the current graph.
  const PlanRecord& execute_query(const std::string& text, const std::string& query_id);

  const lsg::LayeredSemanticGraph& graph() const { return graph_; }
  lsg::LayeredSemanticGraph& graph() { return graph_; }
  const MissionState& state() const { return state_; }
  const sim::WorldSpec& world() const { return world_; }
  const MissionConfig& config() const { return config_; }
  const std::vector<nlohmann::ordered_json>& events() const { return events_; }
  const std::vector<PlanRecord>& plans() const { return plans_; }
  const MissionStats& stats() const { return stats_; }
  /// Ground-truth object matched to each inspected node.
  const std::map<lsg::NodeId, int>& inspected_objects() const { return gt_of_node_; }

  /// Teleport without logging travel; used by tests to stage scenes.
  void place_robot(const sim::RobotState& robot);

 private:
  struct SweepResult {
    std::vector<lsg::NodeId> registered;
  };

  void log(const std::string& event, nlohmann::ordered_json fields = nlohmann::ordered_json::object());
  void move_to(const lsg::Pose6& target);
  void move_to(const Eigen::Vector3d& position);
  void frame();
  const lsg::Pose6& localization_pose() const;
  std::vector<lsg::NodeId> sweep(bool validate_polygons);
  void follow(const hpp::PlanResult& plan);
  void check_target_graph_now();
  void add_inspected_edges(lsg::NodeId id, int gt);
  std::optional<int> match_object(const Eigen::Vector3d& estimate) const;

  sim::WorldSpec world_;
  MissionConfig config_;
  MissionObserver* observer_;
  lsg::LayeredSemanticGraph graph_;
  MissionState state_;
  std::vector<lsg::Pose6> frame_poses_;
  std::vector<nlohmann::ordered_json> events_;
  std::vector<PlanRecord> plans_;
  MissionStats stats_;
  std::map<lsg::NodeId, int> gt_of_node_;
};

/// View-poses of one level: positions on the offset contour (closing pose
/// included, equal to the first) with yaw facing the footprint.
struct ViewPose {
  Eigen::Vector2d xy = Eigen::Vector2d::Zero();
  double yaw = 0.0;
};
std::vector<ViewPose> plan_view_poses(const lsg::ConvexPolygon2D& footprint, double standoff,
                                      double lateral_step, const Eigen::Vector2d& near);

/// Whether an aerial inspection continues from level k to level k+1.
bool needs_next_level(double height, std::uint32_t k, const InspectionParams& params,
                      sim::Modality modality);

}  // namespace xflie::flie
