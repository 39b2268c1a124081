#include "xflie/hpp/dijkstra.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

#include "xflie/hpp/errors.hpp"

namespace xflie::hpp {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::Unreachable: return "Unreachable";
    case Errc::NoInspectedNodes: return "NoInspectedNodes";
    case Errc::NotResolvable: return "NotResolvable";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

namespace {

DijkstraResult dijkstra_once(const GraphView& view, NodeId src, NodeId dst) {
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<NodeId> ids = view.nodes;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index_of = [&ids](NodeId id) -> std::size_t {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) {
      throw std::invalid_argument("dijkstra: node " + std::to_string(id) + " not in view");
    }
    return static_cast<std::size_t>(it - ids.begin());
  };
  const std::size_t s = index_of(src);
  const std::size_t d = index_of(dst);

  // Compressed adjacency: offsets into one neighbour array.
  std::vector<std::size_t> start(ids.size() + 1, 0);
  std::vector<std::pair<std::size_t, std::size_t>> ends;
  ends.reserve(view.edges.size());
  for (const auto& e : view.edges) {
    const std::size_t a = index_of(e.a);
    const std::size_t b = index_of(e.b);
    ends.emplace_back(a, b);
    ++start[a + 1];
    ++start[b + 1];
  }
  for (std::size_t i = 0; i < ids.size(); ++i) start[i + 1] += start[i];
  std::vector<std::pair<std::size_t, double>> adj(start.back());
  {
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t k = 0; k < ends.size(); ++k) {
      const auto [a, b] = ends[k];
      adj[fill[a]++] = {b, view.edges[k].weight};
      adj[fill[b]++] = {a, view.edges[k].weight};
    }
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<double> dist(ids.size(), inf);
  std::vector<std::size_t> prev(ids.size(), none);
  std::vector<char> done(ids.size(), 0);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[s] = 0.0;
  heap.emplace(0.0, s);
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == d) break;
    for (std::size_t k = start[u]; k < start[u + 1]; ++k) {
      const auto [v, w] = adj[k];
      if (done[v]) continue;
      const double alt = du + w;
      if (alt < dist[v]) {
        dist[v] = alt;
        prev[v] = u;
        heap.emplace(alt, v);
      }
    }
  }
  if (dist[d] == inf) {
    throw Error(Errc::Unreachable, std::to_string(src) + " -> " + std::to_string(dst));
  }

  DijkstraResult r;
  for (std::size_t v = d; v != none; v = prev[v]) r.path.push_back(ids[v]);
  std::reverse(r.path.begin(), r.path.end());
  r.cost = dist[d];
  r.exposed_edges = view.edges.size();
  r.plan_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

DijkstraResult dijkstra(const GraphView& view, NodeId src, NodeId dst, int timing_repeats) {
  DijkstraResult r = dijkstra_once(view, src, dst);
  for (int i = 1; i < timing_repeats; ++i) {
    r.plan_time_s = std::min(r.plan_time_s, dijkstra_once(view, src, dst).plan_time_s);
  }
  return r;
}

GraphView target_view(const lsg::LayeredSemanticGraph& g, bool naive,
                      const Eigen::Vector3d& x_odom) {
  GraphView v;
  if (naive) v.nodes.push_back(g.root().id);
  for (const auto& t : g.targets()) {
    if (naive || t.inspected()) v.nodes.push_back(t.id);
    if (naive) v.edges.push_back({g.root().id, t.id, (x_odom - t.position).norm()});
  }
  v.edges.insert(v.edges.end(), g.inspected_edges().begin(), g.inspected_edges().end());
  return v;
}

GraphView level_view(const lsg::LevelGraph& levels) {
  GraphView v;
  for (const auto& l : levels.nodes) v.nodes.push_back(l.id);
  v.edges = levels.edges;
  return v;
}

GraphView pose_view(const lsg::PoseGraph& poses) {
  GraphView v;
  v.nodes.push_back(poses.parent_level_id);
  for (const auto& p : poses.nodes) v.nodes.push_back(p.id);
  v.edges = poses.edges;
  return v;
}

}  // namespace xflie::hpp
