#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xflie/flie/params.hpp"
#include "xflie/lsg/graph.hpp"

namespace xflie::flie {

/// Proximity + area + neighbor-centrality utility of a Detected node. The
/// neighbor term is 0 when it is the only Detected node.
/// Throws Error(DegenerateDistance).
double utility(const lsg::TargetNode& v, const lsg::LayeredSemanticGraph& g,
               const Eigen::Vector3d& robot_pos, const UtilityWeights& w, int image_w = 640,
               int image_h = 480);

/// argmax of utility over Detected nodes, lowest id on ties.
std::optional<lsg::NodeId> select_next_target(const lsg::LayeredSemanticGraph& g,
                                              const Eigen::Vector3d& robot_pos,
                                              const UtilityWeights& w, int image_w = 640,
                                              int image_h = 480);

/// Keep order for duplicate Detected nodes: higher confidence, then larger
/// area, then lower id.
bool keep_before(const lsg::TargetNode& a, const lsg::TargetNode& b);

/// Removes Detected duplicates within d_target_check and Detected nodes inside
/// an Inspected polygon. Returns removed ids in removal order.
std::vector<lsg::NodeId> optimize_target_graph(lsg::LayeredSemanticGraph& g,
                                               const InspectionParams& params);

/// Violations of the post-optimization separation and containment properties.
std::vector<std::string> check_target_graph(const lsg::LayeredSemanticGraph& g,
                                            const InspectionParams& params);

}  // namespace xflie::flie
