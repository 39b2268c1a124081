#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "xflie/hpp/dijkstra.hpp"

namespace xflie::hpp {

struct InspectTarget {
  NodeId target = 0;
};

struct SemanticVisit {
  std::string target_label;
  std::string level_label;
  std::string feature_label;
};

using Query = std::variant<InspectTarget, SemanticVisit>;

/// `Visit <feature> in <level> of <target>`, case-insensitive keywords,
/// whitespace-tolerant. Throws Error(ParseError).
Query parse_query(std::string_view text);

struct ResolvedVisit {
  NodeId target = 0;
  NodeId level = 0;
  NodeId pose = 0;
  NodeId feature = 0;
};

/// Case-insensitive label lookup. Throws Error(UnknownLabel) carrying the
/// nearest label by edit distance.
ResolvedVisit resolve(const lsg::LayeredSemanticGraph& g, const SemanticVisit& q);

std::size_t edit_distance(std::string_view a, std::string_view b);

struct GraphContext {
  NodeId curr_target = 0;
  NodeId dst_target = 0;
  NodeId curr_level = 0;
  NodeId curr_pose = 0;
};

/// Throws Error(NoInspectedNodes).
GraphContext process_graph(const lsg::LayeredSemanticGraph& g, const Eigen::Vector3d& x_odom,
                           NodeId v_trm);

/// Level-layer frontier: Level-0. Throws Error(NotResolvable).
NodeId evaluate_frontier_node(const lsg::LevelGraph& levels);
/// Pose-layer frontier: pose nearest to `toward`, lowest chain index on ties.
NodeId evaluate_frontier_node(const lsg::PoseGraph& poses, const Eigen::Vector3d& toward);

struct LocalSegment {
  lsg::Layer layer = lsg::Layer::Pose;
  NodeId target = 0;
  /// Level whose pose graph was searched; 0 for level and transit segments.
  NodeId level = 0;
  std::vector<NodeId> path;
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d end = Eigen::Vector3d::Zero();
  double length = 0.0;
  double plan_time_s = 0.0;
  std::size_t exposed_edges = 0;
  /// False for the straight transit between two targets' bridge poses.
  bool searched = true;
};

struct PlanResult {
  std::vector<NodeId> global_route;
  /// Present when the Target layer was searched.
  std::optional<DijkstraResult> global;
  std::vector<LocalSegment> segments;
  double total_length = 0.0;
  NodeId terminal_pose = 0;
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  Eigen::Vector3d terminal = Eigen::Vector3d::Zero();
  /// Wall time spent expanding nested graphs, logged separately.
  double expansion_time_s = 0.0;
};

struct PlanOptions {
  bool naive_edges = false;
  /// Each search is repeated this many times and timed by its fastest run.
  int timing_repeats = 1;
};

/// Hierarchical planning over the nested graph. Read-only on `g`.
PlanResult plan(const lsg::LayeredSemanticGraph& g, const Eigen::Vector3d& x_odom,
                const Query& query, const PlanOptions& options = {});

nlohmann::ordered_json to_json(const PlanResult& r);

}  // namespace xflie::hpp
