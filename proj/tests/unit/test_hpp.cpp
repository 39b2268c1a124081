#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <functional>
#include <limits>
#include <random>

#include "xflie/bench/worlds.hpp"
#include "xflie/flie/mission.hpp"
#include "xflie/hpp/dijkstra.hpp"
#include "xflie/hpp/errors.hpp"
#include "xflie/hpp/planner.hpp"
#include "xflie/lsg/graph.hpp"

namespace {

using namespace xflie;
using hpp::GraphView;
using lsg::NodeId;

// Exhaustive simple-path enumeration with cost pruning.
std::optional<double> brute_force_cost(const GraphView& v, NodeId s, NodeId t) {
  std::map<NodeId, std::vector<std::pair<NodeId, double>>> adj;
  for (const auto& e : v.edges) {
    adj[e.a].emplace_back(e.b, e.weight);
    adj[e.b].emplace_back(e.a, e.weight);
  }
  std::optional<double> best;
  std::set<NodeId> on_path{s};
  std::function<void(NodeId, double)> dfs = [&](NodeId u, double cost) {
    if (best && cost > *best) return;
    if (u == t) {
      best = best ? std::min(*best, cost) : cost;
      return;
    }
    for (const auto& [w, c] : adj[u]) {
      if (on_path.contains(w)) continue;
      on_path.insert(w);
      dfs(w, cost + c);
      on_path.erase(w);
    }
  };
  dfs(s, 0.0);
  return best;
}

GraphView random_view(std::mt19937_64& rng, int n, double density) {
  GraphView v;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> w(1, 20);
  for (int i = 0; i < n; ++i) v.nodes.push_back(100 + i);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (u(rng) < density) v.edges.push_back({v.nodes[i], v.nodes[j], static_cast<double>(w(rng))});
    }
  }
  return v;
}

double path_cost(const GraphView& v, const std::vector<NodeId>& path) {
  double c = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : v.edges) {
      if (e.connects(path[i - 1], path[i])) best = std::min(best, e.weight);
    }
    c += best;
  }
  return c;
}

TEST(Dijkstra, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 11;
    const auto v = random_view(rng, n, 0.35);
    const NodeId s = v.nodes.front();
    const NodeId t = v.nodes.back();
    const auto oracle = brute_force_cost(v, s, t);
    if (!oracle) {
      EXPECT_THROW(hpp::dijkstra(v, s, t), hpp::Error);
      continue;
    }
    const auto r = hpp::dijkstra(v, s, t);
    EXPECT_EQ(r.cost, *oracle) << "trial " << trial;
    ASSERT_FALSE(r.path.empty());
    EXPECT_EQ(r.path.front(), s);
    EXPECT_EQ(r.path.back(), t);
    EXPECT_EQ(path_cost(v, r.path), r.cost);
    EXPECT_EQ(r.exposed_edges, v.edges.size());
  }
}

TEST(Dijkstra, TrivialAndErrorCases) {
  GraphView v{{1, 2, 3}, {{1, 2, 1.0}}};
  const auto same = hpp::dijkstra(v, 2, 2);
  EXPECT_THAT(same.path, ::testing::ElementsAre(2u));
  EXPECT_EQ(same.cost, 0.0);
  try {
    hpp::dijkstra(v, 1, 3);
    FAIL();
  } catch (const hpp::Error& e) {
    EXPECT_EQ(e.code(), hpp::Errc::Unreachable);
  }
  EXPECT_THROW(hpp::dijkstra(v, 1, 9), std::invalid_argument);
}

TEST(Dijkstra, TimingRepeatsKeepTheResult) {
  std::mt19937_64 rng(5);
  const auto v = random_view(rng, 10, 0.5);
  const auto a = hpp::dijkstra(v, v.nodes.front(), v.nodes.back(), 1);
  const auto b = hpp::dijkstra(v, v.nodes.front(), v.nodes.back(), 5);
  EXPECT_EQ(a.path, b.path);
  EXPECT_EQ(a.cost, b.cost);
}

TEST(Query, ParsesCaseAndWhitespaceInsensitively) {
  const auto q = hpp::parse_query("  visit   Front Bumper-1  IN Level-0 of   car-0 ");
  const auto& v = std::get<hpp::SemanticVisit>(q);
  EXPECT_EQ(v.feature_label, "Front Bumper-1");
  EXPECT_EQ(v.level_label, "Level-0");
  EXPECT_EQ(v.target_label, "car-0");
}

TEST(Query, RejectsMalformedText) {
  for (const char* text : {"", "go to car-0", "Visit front bumper-1 of car-0", "Visit in Level-0 of car-0"}) {
    try {
      hpp::parse_query(text);
      FAIL() << text;
    } catch (const hpp::Error& e) {
      EXPECT_EQ(e.code(), hpp::Errc::ParseError) << text;
    }
  }
}

TEST(Query, EditDistance) {
  EXPECT_EQ(hpp::edit_distance("kitten", "sitting"), 3u);
  EXPECT_EQ(hpp::edit_distance("", "abc"), 3u);
  EXPECT_EQ(hpp::edit_distance("car-0", "car-0"), 0u);
}

class MissionGraph : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto g = bench::ring_world(3, 1);
    flie::MissionConfig c;
    c.modality = sim::Modality::Ground;
    c.noise = sim::NoiseSpec::none();
    c.start = g.start;
    c.start_yaw = g.start_yaw;
    mission_ = new flie::Mission(g.world, c);
    mission_->run();
  }
  static void TearDownTestSuite() { delete mission_; }

  static const lsg::TargetNode& first(const std::string& cls) {
    for (const auto& t : mission_->graph().targets()) {
      if (t.sem_class == cls) return t;
    }
    throw std::runtime_error("no " + cls);
  }

  static flie::Mission* mission_;
};

flie::Mission* MissionGraph::mission_ = nullptr;

TEST_F(MissionGraph, ResolveFindsNestedNodes) {
  const auto& g = mission_->graph();
  const auto& car = first("car");
  const auto r = hpp::resolve(g, {car.label, "level-0", "FRONT BUMPER-1"});
  EXPECT_EQ(r.target, car.id);
  const auto ref = g.locate(r.feature);
  ASSERT_EQ(ref.layer, lsg::Layer::Feature);
  EXPECT_EQ(ref.pose->id, r.pose);
  EXPECT_EQ(ref.level->id, r.level);
  EXPECT_EQ(ref.feature->label, "front bumper-1");
}

TEST_F(MissionGraph, UnknownLabelsSuggestTheNearest) {
  const auto& car = first("car");
  try {
    hpp::resolve(mission_->graph(), {car.label, "Level-0", "front bumpr-1"});
    FAIL();
  } catch (const hpp::Error& e) {
    EXPECT_EQ(e.code(), hpp::Errc::UnknownLabel);
    EXPECT_EQ(e.suggestion(), "front bumper-1");
  }
  try {
    hpp::resolve(mission_->graph(), {"cra-0", "Level-0", "front bumper-1"});
    FAIL();
  } catch (const hpp::Error& e) {
    EXPECT_EQ(e.code(), hpp::Errc::UnknownLabel);
    EXPECT_FALSE(e.suggestion().empty());
  }
}

TEST_F(MissionGraph, PlanEndsAtTheFeatureParentPose) {
  const auto& g = mission_->graph();
  for (const auto& t : g.targets()) {
    const auto& pose = t.levels->nodes.front().poses.nodes.front();
    for (const auto& other : g.targets()) {
      const std::string text = "Visit front bumper-1 in Level-0 of " + other.label;
      const auto r = hpp::plan(g, pose.pose.position, hpp::parse_query(text));
      const auto visit = hpp::resolve(g, std::get<hpp::SemanticVisit>(hpp::parse_query(text)));
      EXPECT_EQ(r.terminal_pose, visit.pose);
      EXPECT_EQ(r.terminal, g.locate(visit.pose).pose->pose.position);
      // Segments chain end to start.
      Eigen::Vector3d at = r.start;
      double len = 0.0;
      for (const auto& s : r.segments) {
        EXPECT_NEAR((s.start - at).norm(), 0.0, 1e-9);
        at = s.end;
        len += s.length;
      }
      EXPECT_NEAR((at - r.terminal).norm(), 0.0, 1e-9);
      EXPECT_NEAR(len, r.total_length, 1e-9);
      EXPECT_EQ(r.global_route.front(), t.id);
      EXPECT_EQ(r.global_route.back(), other.id);
    }
  }
}

TEST_F(MissionGraph, LocalSearchesOnlySeeOneNestedGraph) {
  const auto& g = mission_->graph();
  const auto& a = g.targets().front();
  const auto& b = g.targets().back();
  const auto r = hpp::plan(g, a.levels->nodes.front().poses.nodes.front().pose.position,
                           hpp::parse_query("Visit front bumper-1 in Level-0 of " + b.label));
  for (const auto& s : r.segments) {
    if (!s.searched || s.layer != lsg::Layer::Pose) continue;
    const auto* level = g.locate(s.level).level;
    ASSERT_NE(level, nullptr);
    EXPECT_EQ(s.exposed_edges, level->poses.edges.size());
  }
  ASSERT_TRUE(r.global);
  EXPECT_EQ(r.global->exposed_edges, g.inspected_edges().size());
}

TEST_F(MissionGraph, NaiveEdgesAddRootEdgesToTheTargetView) {
  const auto& g = mission_->graph();
  const Eigen::Vector3d x(0, 0, 0);
  const auto filtered = hpp::target_view(g, false, x);
  const auto naive = hpp::target_view(g, true, x);
  EXPECT_EQ(naive.edges.size(), filtered.edges.size() + g.targets().size());
  EXPECT_EQ(naive.nodes.size(), g.targets().size() + 1);
}

TEST(ProcessGraph, NoInspectedNodes) {
  lsg::LayeredSemanticGraph g;
  const auto id = g.register_target({{5, 0, 0}, "car", 0.9, 10.0, ""}, {0, 0, 0});
  try {
    hpp::process_graph(g, {0, 0, 0}, id);
    FAIL();
  } catch (const hpp::Error& e) {
    EXPECT_EQ(e.code(), hpp::Errc::NoInspectedNodes);
  }
}

TEST(FrontierNode, EmptyGraphsAreNotResolvable) {
  EXPECT_THROW(hpp::evaluate_frontier_node(lsg::LevelGraph{}), hpp::Error);
  EXPECT_THROW(hpp::evaluate_frontier_node(lsg::PoseGraph{}, Eigen::Vector3d::Zero()), hpp::Error);
}

}  // namespace
