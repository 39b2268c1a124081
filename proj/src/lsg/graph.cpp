#include "xflie/lsg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace xflie::lsg {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::AlreadyInspected: return "AlreadyInspected";
    case Errc::InvalidPolygon: return "InvalidPolygon";
    case Errc::NotInspected: return "NotInspected";
    case Errc::NoNestedGraph: return "NoNestedGraph";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case Errc::MalformedDocument: return "MalformedDocument";
  }
  return "Unknown";
}

const char* to_string(Layer layer) {
  switch (layer) {
    case Layer::Target: return "Target";
    case Layer::Level: return "Level";
    case Layer::Pose: return "Pose";
    case Layer::Feature: return "Feature";
  }
  return "?";
}

const char* to_string(TargetStatus status) {
  return status == TargetStatus::Inspected ? "Inspected" : "Detected";
}

std::string ordinal_label(const std::string& sem_class, std::uint64_t ordinal) {
  return sem_class + "-" + std::to_string(ordinal);
}

const PoseNode* PoseGraph::find(NodeId id) const {
  for (const auto& p : nodes) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

PoseNode& LevelNode::append_pose(PoseNode node) {
  node.features.parent_pose_id = node.id;
  auto& g = poses;
  g.parent_level_id = id;

  // Drop the trailing parent edges, extend the chain, then re-add them.
  std::erase_if(g.edges, [this](const WeightedEdge& e) { return e.touches(id); });
  if (!g.nodes.empty()) {
    const auto& prev = g.nodes.back();
    g.edges.push_back({prev.id, node.id, (prev.pose.position - node.pose.position).norm()});
  }
  g.nodes.push_back(std::move(node));

  const auto& first = g.nodes.front();
  const auto& last = g.nodes.back();
  g.edges.push_back({id, first.id, (position - first.pose.position).norm()});
  if (last.id != first.id) {
    g.edges.push_back({id, last.id, (position - last.pose.position).norm()});
  }
  return g.nodes.back();
}

LevelNode& LevelGraph::add_level(NodeId id, const Eigen::Vector3d& position) {
  LevelNode level;
  level.id = id;
  level.index = static_cast<std::uint32_t>(nodes.size());
  level.label = "Level-" + std::to_string(level.index);
  level.position = position;
  level.poses.parent_level_id = id;
  if (!nodes.empty()) {
    const auto& prev = nodes.back();
    edges.push_back({prev.id, id, (prev.position - position).norm()});
  }
  nodes.push_back(std::move(level));
  return nodes.back();
}

const LevelNode* LevelGraph::find(NodeId id) const {
  for (const auto& l : nodes) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

LayeredSemanticGraph::LayeredSemanticGraph() { root_.id = allocate_id(); }

const TargetNode* LayeredSemanticGraph::find_target(NodeId id) const {
  for (const auto& t : targets_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

const TargetNode& LayeredSemanticGraph::target(NodeId id) const {
  const auto* t = find_target(id);
  if (t == nullptr) throw Error(Errc::UnknownNode, "target " + std::to_string(id));
  return *t;
}

TargetNode& LayeredSemanticGraph::mutable_target(NodeId id) {
  for (auto& t : targets_) {
    if (t.id == id) return t;
  }
  throw Error(Errc::UnknownNode, "target " + std::to_string(id));
}

NodeRef LayeredSemanticGraph::locate(NodeId id) const {
  NodeRef ref;
  if (id == root_.id) {
    ref.is_root = true;
    return ref;
  }
  for (const auto& t : targets_) {
    if (t.id == id) {
      ref.layer = Layer::Target;
      ref.target = &t;
      return ref;
    }
    if (!t.levels) continue;
    for (const auto& l : t.levels->nodes) {
      if (l.id == id) {
        ref.layer = Layer::Level;
        ref.target = &t;
        ref.level = &l;
        return ref;
      }
      for (const auto& p : l.poses.nodes) {
        if (p.id == id) {
          ref.layer = Layer::Pose;
          ref.target = &t;
          ref.level = &l;
          ref.pose = &p;
          return ref;
        }
        for (const auto& f : p.features.nodes) {
          if (f.id == id) {
            ref.layer = Layer::Feature;
            ref.target = &t;
            ref.level = &l;
            ref.pose = &p;
            ref.feature = &f;
            return ref;
          }
        }
      }
    }
  }
  throw Error(Errc::UnknownNode, "node " + std::to_string(id));
}

NodeId LayeredSemanticGraph::register_target(const TargetObservation& obs,
                                             const Eigen::Vector3d& robot_pos) {
  if (!(obs.confidence >= 0.0 && obs.confidence <= 1.0)) {
    throw std::invalid_argument("register_target: confidence outside [0,1]");
  }
  if (!(obs.seg_area > 0.0)) throw std::invalid_argument("register_target: seg_area <= 0");

  // The root moves with the robot; keep every root edge consistent with it.
  Pose6 odom = root_.pose;
  odom.position = robot_pos;
  refresh_root(odom);

  TargetNode node;
  node.id = allocate_id();
  node.label = ordinal_label(obs.sem_class, class_counters_[obs.sem_class]++);
  node.status = TargetStatus::Detected;
  node.position = obs.position;
  node.image_ref = obs.image_ref;
  node.sem_class = obs.sem_class;
  node.confidence = obs.confidence;
  node.seg_area = obs.seg_area;
  node.utility = 0.0;
  node.root_edge_weight = (robot_pos - obs.position).norm();
  targets_.push_back(std::move(node));
  return targets_.back().id;
}

void LayeredSemanticGraph::mark_inspected(NodeId id, std::span<const Eigen::Vector2d> polygon,
                                          LevelGraph levels) {
  auto& t = mutable_target(id);
  if (t.inspected()) throw Error(Errc::AlreadyInspected, t.label);
  if (levels.nodes.empty()) throw std::invalid_argument("mark_inspected: empty level graph");
  ConvexPolygon2D poly(polygon);

  levels.parent_target_id = id;
  const Eigen::Vector2d c = poly.centroid();
  t.position.x() = c.x();
  t.position.y() = c.y();
  t.root_edge_weight = (root_.pose.position - t.position).norm();
  t.polygon = std::move(poly);
  t.levels = std::move(levels);
  t.status = TargetStatus::Inspected;

  // Existing inspected edges on this node are impossible (it was Detected),
  // so no re-weighting is needed.
}

void LayeredSemanticGraph::add_inspected_edge(NodeId a, NodeId b) {
  const auto& ta = target(a);
  const auto& tb = target(b);
  if (!ta.inspected()) throw Error(Errc::NotInspected, ta.label);
  if (!tb.inspected()) throw Error(Errc::NotInspected, tb.label);
  if (a == b) throw std::invalid_argument("add_inspected_edge: self loop");
  for (const auto& e : inspected_edges_) {
    if (e.connects(a, b)) return;
  }
  inspected_edges_.push_back({a, b, (ta.position - tb.position).norm()});
}

void LayeredSemanticGraph::remove_target(NodeId id) {
  const auto before = targets_.size();
  std::erase_if(targets_, [id](const TargetNode& t) { return t.id == id; });
  if (targets_.size() == before) throw Error(Errc::UnknownNode, "target " + std::to_string(id));
  std::erase_if(inspected_edges_, [id](const WeightedEdge& e) { return e.touches(id); });
}

void LayeredSemanticGraph::set_utility(NodeId id, double utility) {
  mutable_target(id).utility = utility;
}

void LayeredSemanticGraph::refresh_root(const Pose6& odom) {
  root_.pose = odom;
  for (auto& t : targets_) t.root_edge_weight = (odom.position - t.position).norm();
}

NestedGraph LayeredSemanticGraph::expand_frontier(NodeId id) const {
  const NodeRef ref = locate(id);
  if (ref.is_root) throw Error(Errc::NoNestedGraph, "root node");
  switch (ref.layer) {
    case Layer::Target:
      if (!ref.target->levels) throw Error(Errc::NoNestedGraph, ref.target->label + " is Detected");
      return &*ref.target->levels;
    case Layer::Level:
      return &ref.level->poses;
    case Layer::Pose:
      return &ref.pose->features;
    case Layer::Feature:
      break;
  }
  throw Error(Errc::NoNestedGraph, "feature node " + std::to_string(id));
}

std::size_t LayeredSemanticGraph::node_count() const {
  std::size_t n = 1;  // root
  for (const auto& t : targets_) {
    ++n;
    if (!t.levels) continue;
    for (const auto& l : t.levels->nodes) {
      ++n;
      for (const auto& p : l.poses.nodes) n += 1 + p.features.nodes.size();
    }
  }
  return n;
}

std::size_t LayeredSemanticGraph::edge_count() const {
  // Root edges + inspected edges + every nested edge, symbolic ones included.
  std::size_t n = targets_.size() + inspected_edges_.size();
  for (const auto& t : targets_) {
    if (!t.levels) continue;
    n += t.levels->edges.size() + t.levels->nodes.size();
    for (const auto& l : t.levels->nodes) {
      n += l.poses.edges.size();
      for (const auto& p : l.poses.nodes) n += p.features.nodes.size();
    }
  }
  return n;
}

namespace {

class Checker {
 public:
  Checker(const LayeredSemanticGraph& g, double tol) : g_(g), tol_(tol) {}

  std::vector<std::string> run() {
    seen(g_.root().id, "root");
    for (const auto& t : g_.targets()) target(t);
    for (const auto& e : g_.inspected_edges()) {
      const auto* a = g_.find_target(e.a);
      const auto* b = g_.find_target(e.b);
      if (a == nullptr || b == nullptr) {
        fail("inspected edge references unknown target");
        continue;
      }
      if (!a->inspected() || !b->inspected()) fail("inspected edge on a Detected node");
      weight(e, a->position, b->position, "target");
    }
    return std::move(violations_);
  }

 private:
  void fail(const std::string& msg) { violations_.push_back(msg); }

  void seen(NodeId id, const std::string& what) {
    if (!ids_.insert(id).second) fail("duplicate node id " + std::to_string(id) + " (" + what + ")");
    if (id >= g_.next_node_id()) fail("node id " + std::to_string(id) + " >= next_node_id");
  }

  void weight(const WeightedEdge& e, const Eigen::Vector3d& pa, const Eigen::Vector3d& pb,
              const char* layer) {
    const double d = (pa - pb).norm();
    if (std::abs(e.weight - d) >= tol_) {
      std::ostringstream os;
      os << layer << " edge " << e.a << "-" << e.b << " weight " << e.weight << " != " << d;
      fail(os.str());
    }
  }

  void target(const TargetNode& t) {
    seen(t.id, t.label);
    if (!(t.confidence >= 0.0 && t.confidence <= 1.0)) fail(t.label + ": confidence outside [0,1]");
    if (!(t.seg_area > 0.0)) fail(t.label + ": seg_area <= 0");
    const double rw = (g_.root().pose.position - t.position).norm();
    if (std::abs(rw - t.root_edge_weight) >= tol_) fail(t.label + ": stale root edge weight");
    if (!t.inspected()) {
      if (t.polygon || t.levels) fail(t.label + ": Detected node carries nested attributes");
      return;
    }
    if (!t.polygon || !t.levels) {
      fail(t.label + ": Inspected node missing polygon or level graph");
      return;
    }
    if (t.polygon->size() < 3) fail(t.label + ": polygon with < 3 vertices");
    if (t.levels->parent_target_id != t.id) fail(t.label + ": level graph parent mismatch");
    levels(t, *t.levels);
  }

  void levels(const TargetNode& t, const LevelGraph& lg) {
    if (lg.nodes.empty()) fail(t.label + ": empty level graph");
    for (std::size_t k = 0; k < lg.nodes.size(); ++k) {
      const auto& l = lg.nodes[k];
      seen(l.id, l.label);
      if (l.index != k) fail(t.label + ": non-contiguous level index");
      poses(l);
    }
    if (lg.edges.size() + 1 != lg.nodes.size() && !lg.nodes.empty()) {
      fail(t.label + ": level edge count mismatch");
    }
    for (std::size_t k = 0; k + 1 < lg.nodes.size(); ++k) {
      const auto& a = lg.nodes[k];
      const auto& b = lg.nodes[k + 1];
      const auto n = std::count_if(lg.edges.begin(), lg.edges.end(),
                                   [&](const WeightedEdge& e) { return e.connects(a.id, b.id); });
      if (n != 1) fail(t.label + ": adjacent levels must share exactly one edge");
    }
    for (const auto& e : lg.edges) {
      const auto* a = lg.find(e.a);
      const auto* b = lg.find(e.b);
      if (a == nullptr || b == nullptr) {
        fail(t.label + ": level edge references unknown level");
        continue;
      }
      weight(e, a->position, b->position, "level");
    }
  }

  void poses(const LevelNode& l) {
    const auto& pg = l.poses;
    if (pg.parent_level_id != l.id) fail(l.label + ": pose graph parent mismatch");
    if (pg.nodes.empty()) fail(l.label + ": empty pose graph");
    for (const auto& p : pg.nodes) {
      seen(p.id, p.label);
      if (std::abs(p.pose.orientation.norm() - 1.0) > 1e-9) fail(p.label + ": non-unit quaternion");
      if (p.features.parent_pose_id != p.id) fail(p.label + ": feature graph parent mismatch");
      for (const auto& f : p.features.nodes) {
        seen(f.id, f.label);
        if (!(f.confidence >= 0.0 && f.confidence <= 1.0)) fail(f.label + ": confidence outside [0,1]");
      }
    }
    // Chain property: consecutive nodes linked, interior degree 2, parent on both ends.
    std::map<NodeId, int> degree;
    std::size_t chain_edges = 0;
    for (const auto& e : pg.edges) {
      if (e.touches(l.id)) {
        const NodeId other = e.a == l.id ? e.b : e.a;
        const auto* p = pg.find(other);
        if (p == nullptr) {
          fail(l.label + ": parent edge to unknown pose");
          continue;
        }
        weight(e, l.position, p->pose.position, "pose-parent");
        continue;
      }
      const auto* a = pg.find(e.a);
      const auto* b = pg.find(e.b);
      if (a == nullptr || b == nullptr) {
        fail(l.label + ": pose edge references unknown pose");
        continue;
      }
      ++chain_edges;
      ++degree[e.a];
      ++degree[e.b];
      weight(e, a->pose.position, b->pose.position, "pose");
    }
    if (pg.nodes.empty()) return;
    if (chain_edges + 1 != pg.nodes.size()) fail(l.label + ": pose layer is not a single chain");
    for (std::size_t i = 0; i + 1 < pg.nodes.size(); ++i) {
      const auto& a = pg.nodes[i];
      const auto& b = pg.nodes[i + 1];
      const bool linked = std::any_of(pg.edges.begin(), pg.edges.end(),
                                      [&](const WeightedEdge& e) { return e.connects(a.id, b.id); });
      if (!linked) fail(l.label + ": consecutive poses not linked");
    }
    if (pg.nodes.size() > 1) {
      std::size_t ends = 0;
      for (const auto& p : pg.nodes) {
        const int d = degree[p.id];
        if (d == 1) ++ends;
        if (d < 1 || d > 2) fail(p.label + ": pose-layer degree " + std::to_string(d));
      }
      if (ends != 2) fail(l.label + ": chain must have exactly two ends");
    }
    const NodeId first = pg.nodes.front().id;
    const NodeId last = pg.nodes.back().id;
    std::set<NodeId> parent_links;
    for (const auto& e : pg.edges) {
      if (e.touches(l.id)) parent_links.insert(e.a == l.id ? e.b : e.a);
    }
    if (parent_links != std::set<NodeId>{first, last}) {
      fail(l.label + ": parent must connect exactly the first and last pose");
    }
  }

  const LayeredSemanticGraph& g_;
  double tol_;
  std::set<NodeId> ids_;
  std::vector<std::string> violations_;
};

}  // namespace

std::vector<std::string> check_invariants(const LayeredSemanticGraph& g, double tol) {
  return Checker(g, tol).run();
}

}  // namespace xflie::lsg
