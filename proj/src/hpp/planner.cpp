#include "xflie/hpp/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cctype>
#include <limits>
#include <regex>
#include <sstream>

#include "xflie/hpp/errors.hpp"

namespace xflie::hpp {

namespace {

using lsg::LayeredSemanticGraph;
using lsg::LevelGraph;
using lsg::PoseGraph;
using Clock = std::chrono::steady_clock;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string collapse_ws(const std::string& s) {
  std::istringstream in(s);
  std::string word;
  std::string out;
  while (in >> word) {
    if (!out.empty()) out += ' ';
    out += word;
  }
  return out;
}

[[noreturn]] void unknown_label(const std::string& what, const std::string& wanted,
                                const std::vector<std::string>& known) {
  std::string best;
  std::size_t best_d = std::numeric_limits<std::size_t>::max();
  for (const auto& k : known) {
    const std::size_t d = edit_distance(lower(wanted), lower(k));
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  std::string msg = what + " '" + wanted + "'";
  if (!best.empty()) msg += " (did you mean '" + best + "'?)";
  throw Error(Errc::UnknownLabel, msg, best);
}

Eigen::Vector3d node_position(const LayeredSemanticGraph& g, NodeId id) {
  const lsg::NodeRef ref = g.locate(id);
  if (ref.is_root) return g.root().pose.position;
  switch (ref.layer) {
    case lsg::Layer::Target: return ref.target->position;
    case lsg::Layer::Level: return ref.level->position;
    case lsg::Layer::Pose: return ref.pose->pose.position;
    case lsg::Layer::Feature: return ref.feature->position;
  }
  return Eigen::Vector3d::Zero();
}

// Nested-graph access goes through expand_frontier only; the time spent is
// accounted separately from search time.
class Expander {
 public:
  explicit Expander(const LayeredSemanticGraph& g) : g_(g) {}

  const LevelGraph& levels(NodeId target) { return *std::get<const LevelGraph*>(expand(target)); }
  const PoseGraph& poses(NodeId level) { return *std::get<const PoseGraph*>(expand(level)); }
  double seconds() const { return seconds_; }

 private:
  lsg::NestedGraph expand(NodeId id) {
    const auto t0 = Clock::now();
    auto r = g_.expand_frontier(id);
    seconds_ += std::chrono::duration<double>(Clock::now() - t0).count();
    return r;
  }

  const LayeredSemanticGraph& g_;
  double seconds_ = 0.0;
};

struct Cursor {
  NodeId target = 0;
  NodeId level = 0;
  NodeId pose = 0;
};

class PlanBuilder {
 public:
  PlanBuilder(const LayeredSemanticGraph& g, PlanResult& out, int repeats)
      : g_(g), out_(out), ex_(g), repeats_(repeats) {}

  Expander& expander() { return ex_; }

  void search(lsg::Layer layer, NodeId target, NodeId level, const GraphView& view, NodeId src,
              NodeId dst) {
    DijkstraResult r = dijkstra(view, src, dst, repeats_);
    LocalSegment s;
    s.layer = layer;
    s.target = target;
    s.level = level;
    s.path = std::move(r.path);
    s.start = node_position(g_, src);
    s.end = node_position(g_, dst);
    s.length = r.cost;
    s.plan_time_s = r.plan_time_s;
    s.exposed_edges = r.exposed_edges;
    push(std::move(s));
  }

  void transit(NodeId from_target, NodeId to_target, NodeId from_pose, NodeId to_pose) {
    LocalSegment s;
    s.layer = lsg::Layer::Target;
    s.target = from_target;
    s.path = {from_target, to_target};
    s.start = node_position(g_, from_pose);
    s.end = node_position(g_, to_pose);
    s.length = (s.end - s.start).norm();
    s.searched = false;
    push(std::move(s));
  }

  void move_within(NodeId target, const Cursor& from, NodeId to_level, NodeId to_pose) {
    if (from.level == to_level) {
      if (from.pose != to_pose) {
        search(lsg::Layer::Pose, target, to_level, pose_view(ex_.poses(to_level)), from.pose, to_pose);
      }
      return;
    }
    search(lsg::Layer::Pose, target, from.level, pose_view(ex_.poses(from.level)), from.pose,
           from.level);
    search(lsg::Layer::Level, target, 0, level_view(ex_.levels(target)), from.level, to_level);
    search(lsg::Layer::Pose, target, to_level, pose_view(ex_.poses(to_level)), to_level, to_pose);
  }

 private:
  void push(LocalSegment s) {
    out_.total_length += s.length;
    out_.segments.push_back(std::move(s));
  }

  const LayeredSemanticGraph& g_;
  PlanResult& out_;
  Expander ex_;
  int repeats_;
};

}  // namespace

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

Query parse_query(std::string_view text) {
  static const std::regex grammar(R"(^\s*visit\s+(.+?)\s+in\s+(.+?)\s+of\s+(.+?)\s*$)",
                                  std::regex::ECMAScript | std::regex::icase);
  std::smatch m;
  const std::string s(text);
  if (!std::regex_match(s, m, grammar)) {
    throw Error(Errc::ParseError, "expected 'Visit <feature> in <level> of <target>', got '" + s + "'");
  }
  return SemanticVisit{collapse_ws(m[3]), collapse_ws(m[2]), collapse_ws(m[1])};
}

ResolvedVisit resolve(const LayeredSemanticGraph& g, const SemanticVisit& q) {
  ResolvedVisit r;
  const lsg::TargetNode* target = nullptr;
  std::vector<std::string> known;
  for (const auto& t : g.targets()) {
    known.push_back(t.label);
    if (lower(t.label) == lower(q.target_label)) target = &t;
  }
  if (target == nullptr) unknown_label("target", q.target_label, known);
  if (!target->inspected()) unknown_label("inspected target", q.target_label, {});
  r.target = target->id;

  const lsg::LevelNode* level = nullptr;
  known.clear();
  for (const auto& l : target->levels->nodes) {
    known.push_back(l.label);
    if (lower(l.label) == lower(q.level_label)) level = &l;
  }
  if (level == nullptr) unknown_label("level", q.level_label, known);
  r.level = level->id;

  known.clear();
  for (const auto& p : level->poses.nodes) {
    for (const auto& f : p.features.nodes) {
      known.push_back(f.label);
      if (lower(f.label) == lower(q.feature_label)) {
        r.pose = p.id;
        r.feature = f.id;
        return r;
      }
    }
  }
  unknown_label("feature", q.feature_label, known);
}

GraphContext process_graph(const LayeredSemanticGraph& g, const Eigen::Vector3d& x_odom,
                           NodeId v_trm) {
  std::vector<const lsg::TargetNode*> inspected;
  for (const auto& t : g.targets()) {
    if (t.inspected()) inspected.push_back(&t);
  }
  if (inspected.empty()) throw Error(Errc::NoInspectedNodes, "no inspected targets to plan over");

  auto nearest = [&inspected](const Eigen::Vector3d& p, bool containing) -> const lsg::TargetNode* {
    const lsg::TargetNode* best = nullptr;
    double best_d = std::numeric_limits<double>::infinity();
    for (const auto* t : inspected) {
      if (containing && !t->polygon->contains(p.head<2>(), 1e-6)) continue;
      const double d = (t->position - p).norm();
      if (d < best_d) {
        best_d = d;
        best = t;
      }
    }
    return best;
  };

  GraphContext ctx;
  const lsg::TargetNode* curr = nearest(x_odom, true);
  if (curr == nullptr) curr = nearest(x_odom, false);
  ctx.curr_target = curr->id;

  double best = std::numeric_limits<double>::infinity();
  for (const auto& l : curr->levels->nodes) {
    for (const auto& p : l.poses.nodes) {
      const double d = (p.pose.position - x_odom).norm();
      if (d < best) {
        best = d;
        ctx.curr_level = l.id;
        ctx.curr_pose = p.id;
      }
    }
  }
  if (best == std::numeric_limits<double>::infinity()) {
    throw Error(Errc::NotResolvable, curr->label + " has no pose nodes");
  }

  const lsg::TargetNode& trm = g.target(v_trm);
  ctx.dst_target = trm.inspected() ? trm.id : nearest(trm.position, false)->id;
  return ctx;
}

NodeId evaluate_frontier_node(const LevelGraph& levels) {
  if (levels.nodes.empty()) throw Error(Errc::NotResolvable, "empty level graph");
  return levels.nodes.front().id;
}

NodeId evaluate_frontier_node(const PoseGraph& poses, const Eigen::Vector3d& toward) {
  if (poses.nodes.empty()) throw Error(Errc::NotResolvable, "empty pose graph");
  NodeId best = poses.nodes.front().id;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& p : poses.nodes) {
    const double d = (p.pose.position - toward).norm();
    if (d < best_d) {
      best_d = d;
      best = p.id;
    }
  }
  return best;
}

PlanResult plan(const LayeredSemanticGraph& g, const Eigen::Vector3d& x_odom, const Query& query,
                const PlanOptions& options) {
  PlanResult out;
  PlanBuilder builder(g, out, options.timing_repeats);
  Expander& ex = builder.expander();

  NodeId v_trm = 0;
  std::optional<ResolvedVisit> visit;
  if (const auto* sv = std::get_if<SemanticVisit>(&query)) {
    visit = resolve(g, *sv);
    v_trm = visit->target;
  } else {
    v_trm = std::get<InspectTarget>(query).target;
  }

  const GraphContext ctx = process_graph(g, x_odom, v_trm);

  NodeId trm_level = 0;
  NodeId trm_pose = 0;
  if (visit) {
    trm_level = visit->level;
    trm_pose = visit->pose;
  } else {
    trm_level = evaluate_frontier_node(ex.levels(ctx.dst_target));
    trm_pose = evaluate_frontier_node(ex.poses(trm_level), g.target(v_trm).position);
  }
  out.terminal_pose = trm_pose;
  out.start = node_position(g, ctx.curr_pose);
  out.terminal = node_position(g, trm_pose);

  if (ctx.curr_target == ctx.dst_target) {
    out.global_route = {ctx.curr_target};
  } else {
    DijkstraResult r = dijkstra(target_view(g, options.naive_edges, x_odom), ctx.curr_target,
                                ctx.dst_target, options.timing_repeats);
    std::erase(r.path, g.root().id);
    out.global_route = r.path;
    out.global = std::move(r);
  }

  Cursor cur{ctx.curr_target, ctx.curr_level, ctx.curr_pose};
  for (std::size_t i = 0; i < out.global_route.size(); ++i) {
    const NodeId t = out.global_route[i];
    const bool last = i + 1 == out.global_route.size();
    if (last) {
      builder.move_within(t, cur, trm_level, trm_pose);
      break;
    }
    const NodeId next = out.global_route[i + 1];
    const NodeId bridge_level = evaluate_frontier_node(ex.levels(t));
    const NodeId bridge_pose = evaluate_frontier_node(ex.poses(bridge_level), g.target(next).position);
    builder.move_within(t, cur, bridge_level, bridge_pose);

    const NodeId arrival_level = evaluate_frontier_node(ex.levels(next));
    const NodeId arrival_pose = evaluate_frontier_node(ex.poses(arrival_level), g.target(t).position);
    builder.transit(t, next, bridge_pose, arrival_pose);
    cur = {next, arrival_level, arrival_pose};
  }
  out.expansion_time_s = ex.seconds();
  return out;
}

nlohmann::ordered_json to_json(const PlanResult& r) {
  using Json = nlohmann::ordered_json;
  auto vec = [](const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); };
  Json segs = Json::array();
  for (const auto& s : r.segments) {
    segs.push_back(Json{{"layer", lsg::to_string(s.layer)},
                        {"target", s.target},
                        {"level", s.level},
                        {"path", s.path},
                        {"start", vec(s.start)},
                        {"end", vec(s.end)},
                        {"length_m", s.length},
                        {"plan_time_s", s.plan_time_s},
                        {"edges_exposed", s.exposed_edges},
                        {"searched", s.searched}});
  }
  Json out{{"global_route", r.global_route}};
  if (r.global) {
    out["global"] = Json{{"cost", r.global->cost},
                         {"edges_exposed", r.global->exposed_edges},
                         {"plan_time_s", r.global->plan_time_s}};
  } else {
    out["global"] = nullptr;
  }
  out["segments"] = std::move(segs);
  out["total_length_m"] = r.total_length;
  out["terminal_pose"] = r.terminal_pose;
  out["start"] = vec(r.start);
  out["terminal"] = vec(r.terminal);
  out["expansion_time_s"] = r.expansion_time_s;
  return out;
}

}  // namespace xflie::hpp
