#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "xflie/lsg/errors.hpp"
#include "xflie/lsg/polygon.hpp"

namespace xflie::lsg {

using NodeId = std::uint64_t;

/// Nesting order of the abstraction layers.
enum class Layer { Target, Level, Pose, Feature };

enum class TargetStatus { Detected, Inspected };

const char* to_string(Layer layer);
const char* to_string(TargetStatus status);

struct Pose6 {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  bool operator==(const Pose6& o) const {
    return position == o.position && orientation.coeffs() == o.orientation.coeffs();
  }
};

struct WeightedEdge {
  NodeId a = 0;
  NodeId b = 0;
  double weight = 0.0;

  bool touches(NodeId id) const { return a == id || b == id; }
  bool connects(NodeId x, NodeId y) const { return (a == x && b == y) || (a == y && b == x); }
  bool operator==(const WeightedEdge&) const = default;
};

struct FeatureNode {
  NodeId id = 0;
  std::string label;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::string sem_class;
  double confidence = 0.0;
  double seg_area = 0.0;

  bool operator==(const FeatureNode&) const = default;
};

/// Features observed from one pose. Every node implicitly shares a symbolic
/// edge with the parent pose.
struct FeatureGraph {
  NodeId parent_pose_id = 0;
  std::vector<FeatureNode> nodes;

  bool operator==(const FeatureGraph&) const = default;
};

struct PoseNode {
  NodeId id = 0;
  std::string label;
  Pose6 pose;
  std::string image_ref;
  FeatureGraph features;

  bool operator==(const PoseNode&) const = default;
};

/// View-pose chain of one inspection level. `edges` holds the chain edges in
/// order followed by the parent-first and (when distinct) parent-last edges.
struct PoseGraph {
  NodeId parent_level_id = 0;
  std::vector<PoseNode> nodes;
  std::vector<WeightedEdge> edges;

  const PoseNode* find(NodeId id) const;
  bool operator==(const PoseGraph&) const = default;
};

struct LevelNode {
  NodeId id = 0;
  std::string label;
  std::uint32_t index = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  PoseGraph poses;

  /// Appends to the chain, keeping chain and parent edges consistent.
  PoseNode& append_pose(PoseNode node);

  bool operator==(const LevelNode& o) const {
    return id == o.id && label == o.label && index == o.index && position == o.position &&
           poses == o.poses;
  }
};

struct LevelGraph {
  NodeId parent_target_id = 0;
  std::vector<LevelNode> nodes;
  /// Weighted edges between adjacent levels. Parent-child edges are symbolic.
  std::vector<WeightedEdge> edges;

  /// Adds Level-k with k = current size, linked to Level-(k-1).
  LevelNode& add_level(NodeId id, const Eigen::Vector3d& position);

  const LevelNode* find(NodeId id) const;
  bool operator==(const LevelGraph&) const = default;
};

/// Detection attributes handed to register_target.
struct TargetObservation {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::string sem_class;
  double confidence = 1.0;
  double seg_area = 1.0;
  std::string image_ref;
};

struct TargetNode {
  NodeId id = 0;
  std::string label;
  TargetStatus status = TargetStatus::Detected;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::string image_ref;
  std::string sem_class;
  double confidence = 0.0;
  double seg_area = 0.0;
  double utility = 0.0;
  /// Weight of the edge to the root node, refreshed lazily.
  double root_edge_weight = 0.0;
  std::optional<ConvexPolygon2D> polygon;
  std::optional<LevelGraph> levels;

  bool inspected() const { return status == TargetStatus::Inspected; }
  bool operator==(const TargetNode&) const = default;
};

struct RootNode {
  NodeId id = 0;
  Pose6 pose;
  bool operator==(const RootNode&) const = default;
};

using NestedGraph = std::variant<const LevelGraph*, const PoseGraph*, const FeatureGraph*>;

/// Result of an id lookup across the nested structure.
struct NodeRef {
  Layer layer = Layer::Target;
  const TargetNode* target = nullptr;
  const LevelNode* level = nullptr;
  const PoseNode* pose = nullptr;
  const FeatureNode* feature = nullptr;
  bool is_root = false;
};

class LayeredSemanticGraph {
 public:
  LayeredSemanticGraph();

  /// Fresh globally unique id. Ids are never reused.
  NodeId allocate_id() { return next_node_id_++; }
  NodeId next_node_id() const { return next_node_id_; }

  const RootNode& root() const { return root_; }
  const std::vector<TargetNode>& targets() const { return targets_; }
  const std::vector<WeightedEdge>& inspected_edges() const { return inspected_edges_; }
  const std::map<std::string, std::uint64_t>& class_counters() const { return class_counters_; }

  const TargetNode* find_target(NodeId id) const;
  const TargetNode& target(NodeId id) const;
  NodeRef locate(NodeId id) const;

  /// Registers a Detected target with a root edge of weight |robot_pos - est|.
  NodeId register_target(const TargetObservation& obs, const Eigen::Vector3d& robot_pos);

  /// Detected -> Inspected. The position moves to the polygon centroid (z kept).
  void mark_inspected(NodeId id, std::span<const Eigen::Vector2d> polygon, LevelGraph levels);

  /// Idempotent; both endpoints must be Inspected.
  void add_inspected_edge(NodeId a, NodeId b);

  void remove_target(NodeId id);
  void set_utility(NodeId id, double utility);

  /// Moves the root to `odom` and recomputes every root edge weight.
  void refresh_root(const Pose6& odom);

  /// Nested local graph held by a layer frontier node.
  NestedGraph expand_frontier(NodeId id) const;

  std::size_t node_count() const;
  std::size_t edge_count() const;

  bool operator==(const LayeredSemanticGraph&) const = default;

 private:
  TargetNode& mutable_target(NodeId id);

  RootNode root_;
  std::vector<TargetNode> targets_;
  std::vector<WeightedEdge> inspected_edges_;
  std::map<std::string, std::uint64_t> class_counters_;
  NodeId next_node_id_ = 0;

  friend struct GraphAccess;
};

/// Raw state access used by deserialization.
struct GraphAccess {
  static RootNode& root(LayeredSemanticGraph& g) { return g.root_; }
  static std::vector<TargetNode>& targets(LayeredSemanticGraph& g) { return g.targets_; }
  static std::vector<WeightedEdge>& inspected_edges(LayeredSemanticGraph& g) {
    return g.inspected_edges_;
  }
  static std::map<std::string, std::uint64_t>& class_counters(LayeredSemanticGraph& g) {
    return g.class_counters_;
  }
  static NodeId& next_node_id(LayeredSemanticGraph& g) { return g.next_node_id_; }
};

/// "<class>-<ordinal>", e.g. "car-0".
std::string ordinal_label(const std::string& sem_class, std::uint64_t ordinal);

/// Full-traversal structural check. Returns human-readable violations.
std::vector<std::string> check_invariants(const LayeredSemanticGraph& g, double tol = 1e-9);

}  // namespace xflie::lsg
