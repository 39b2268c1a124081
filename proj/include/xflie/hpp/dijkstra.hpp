#pragma once

#include <cstddef>
#include <vector>

#include "xflie/lsg/graph.hpp"

namespace xflie::hpp {

using lsg::NodeId;

/// The single local graph handed to the planner for one call.
struct GraphView {
  std::vector<NodeId> nodes;
  std::vector<lsg::WeightedEdge> edges;
};

struct DijkstraResult {
  std::vector<NodeId> path;
  double cost = 0.0;
  /// Edge count of the view, the exposure metric.
  std::size_t exposed_edges = 0;
  double plan_time_s = 0.0;
};

/// Binary-heap Dijkstra. Ties settle the lower node id first, so results are
/// deterministic. Throws Error(Unreachable); std::invalid_argument when an
/// endpoint is not in the view. With `timing_repeats` > 1 the search is
/// repeated and plan_time_s is the fastest run.
DijkstraResult dijkstra(const GraphView& view, NodeId src, NodeId dst, int timing_repeats = 1);

/// Target layer: Inspected nodes and v^I-v^I edges only. With `naive` the
/// root and every target join, with root edges weighted from `x_odom`.
GraphView target_view(const lsg::LayeredSemanticGraph& g, bool naive,
                      const Eigen::Vector3d& x_odom);
GraphView level_view(const lsg::LevelGraph& levels);
/// Pose layer including the parent level node.
GraphView pose_view(const lsg::PoseGraph& poses);

}  // namespace xflie::hpp
