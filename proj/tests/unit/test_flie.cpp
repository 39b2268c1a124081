#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "xflie/bench/worlds.hpp"
#include "xflie/flie/consistency.hpp"
#include "xflie/flie/errors.hpp"
#include "xflie/flie/mission.hpp"
#include "xflie/flie/pf_graph.hpp"
#include "xflie/flie/selection.hpp"
#include "xflie/flie/similarity.hpp"
#include "xflie/lsg/serialize.hpp"

namespace {

using namespace xflie;
using flie::FovZone;
using flie::Verdict;

struct RawTarget {
  Eigen::Vector3d position;
  double seg_area;
  bool inspected;
};

// Utility computed directly from the raw target list.
double utility_oracle(const std::vector<RawTarget>& ts, std::size_t v, const Eigen::Vector3d& x,
                      const flie::UtilityWeights& w) {
  const double p = 1.0 / std::sqrt((x - ts[v].position).squaredNorm());
  const double a = ts[v].seg_area / (640.0 * 480.0);
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i == v || ts[i].inspected) continue;
    sum += std::sqrt((ts[i].position - ts[v].position).squaredNorm());
    ++n;
  }
  const double nb = n == 0 ? 0.0 : n / sum;
  return w.s_p * p + w.s_a * a + w.s_n * nb;
}

lsg::NodeId add(lsg::LayeredSemanticGraph& g, const RawTarget& t) {
  const auto id = g.register_target({t.position, "car", 0.9, t.seg_area, ""}, Eigen::Vector3d::Zero());
  if (t.inspected) {
    const Eigen::Vector2d c = t.position.head<2>();
    const std::vector<Eigen::Vector2d> sq{c + Eigen::Vector2d(-0.5, -0.5), c + Eigen::Vector2d(0.5, -0.5),
                                          c + Eigen::Vector2d(0.5, 0.5), c + Eigen::Vector2d(-0.5, 0.5)};
    lsg::LevelGraph levels;
    levels.parent_target_id = id;
    levels.add_level(g.allocate_id(), t.position);
    g.mark_inspected(id, sq, std::move(levels));
  }
  return id;
}

TEST(Utility, MatchesOracleOnRandomConfigurations) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> pos(-40.0, 40.0);
  std::uniform_real_distribution<double> area(100.0, 50000.0);
  std::uniform_int_distribution<int> count(1, 8);
  const flie::UtilityWeights w;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<RawTarget> ts;
    lsg::LayeredSemanticGraph g;
    std::vector<lsg::NodeId> ids;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      ts.push_back({{pos(rng), pos(rng), 0.0}, area(rng), i > 0 && trial % 3 == 0 && i % 2 == 0});
      ids.push_back(add(g, ts.back()));
    }
    const Eigen::Vector3d x(pos(rng), pos(rng), 1.0);
    for (int i = 0; i < n; ++i) {
      if (ts[i].inspected) continue;
      const auto* node = g.find_target(ids[i]);
      ASSERT_NE(node, nullptr);
      EXPECT_NEAR(flie::utility(*node, g, x, w), utility_oracle(ts, i, x, w), 1e-9);
    }
  }
}

TEST(Utility, SingleDetectedNodeHasNoNeighborTerm) {
  lsg::LayeredSemanticGraph g;
  const auto id = add(g, {{3, 4, 0}, 640.0 * 480.0, false});
  const flie::UtilityWeights w{1.0, 1.0, 100.0};
  EXPECT_DOUBLE_EQ(flie::utility(*g.find_target(id), g, Eigen::Vector3d::Zero(), w), 1.0 / 5.0 + 1.0);
}

TEST(Utility, DegenerateDistance) {
  lsg::LayeredSemanticGraph g;
  const auto id = add(g, {{1, 1, 0}, 10.0, false});
  try {
    flie::utility(*g.find_target(id), g, Eigen::Vector3d(1, 1, 0), {});
    FAIL();
  } catch (const flie::Error& e) {
    EXPECT_EQ(e.code(), flie::Errc::DegenerateDistance);
  }
}

TEST(Selection, TiesGoToTheLowerId) {
  lsg::LayeredSemanticGraph g;
  const auto a = add(g, {{5, 0, 0}, 10.0, false});
  add(g, {{-5, 0, 0}, 10.0, false});
  EXPECT_EQ(flie::select_next_target(g, Eigen::Vector3d::Zero(), {}), a);
}

TEST(Selection, EmptyWhenNothingIsDetected) {
  lsg::LayeredSemanticGraph g;
  add(g, {{5, 0, 0}, 10.0, true});
  EXPECT_FALSE(flie::select_next_target(g, Eigen::Vector3d::Zero(), {}).has_value());
}

TEST(OptimizeTargetGraph, SeparationAndContainmentHoldAfterwards) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(-15.0, 15.0);
  std::uniform_real_distribution<double> conf(0.3, 1.0);
  flie::InspectionParams params;
  for (int trial = 0; trial < 200; ++trial) {
    lsg::LayeredSemanticGraph g;
    add(g, {{0, 0, 0}, 10.0, true});
    for (int i = 0; i < 12; ++i) {
      g.register_target({{pos(rng), pos(rng), 0.0}, "car", conf(rng), 10.0, ""}, Eigen::Vector3d::Zero());
    }
    const auto before = g.targets().size();
    const auto removed = flie::optimize_target_graph(g, params);
    EXPECT_EQ(g.targets().size() + removed.size(), before);
    EXPECT_THAT(flie::check_target_graph(g, params), ::testing::IsEmpty());
    EXPECT_THAT(flie::optimize_target_graph(g, params), ::testing::IsEmpty());
  }
}

TEST(OptimizeTargetGraph, KeepsTheMoreConfidentDuplicate) {
  lsg::LayeredSemanticGraph g;
  g.register_target({{0, 10, 0}, "car", 0.6, 10.0, ""}, Eigen::Vector3d::Zero());
  const auto strong = g.register_target({{1, 10, 0}, "car", 0.9, 10.0, ""}, Eigen::Vector3d::Zero());
  flie::optimize_target_graph(g, {});
  ASSERT_EQ(g.targets().size(), 1u);
  EXPECT_EQ(g.targets().front().id, strong);
}

flie::ObservationRecord rec(std::vector<std::uint64_t> cells) { return {0, std::move(cells)}; }

TEST(SceneSimilarity, SetNormalizedAverage) {
  const auto q = rec({1, 2, 3, 4});
  const std::vector<flie::ObservationRecord> cands{rec({1, 2, 3, 4}), rec({3, 4, 9})};
  // (4 + 2) / (2 * 4)
  EXPECT_DOUBLE_EQ(flie::scene_similarity(q, cands, 0.0, 1.0), 0.75);
  EXPECT_DOUBLE_EQ(flie::scene_similarity(q, cands, 0.0, 1.0, flie::SimilarityNorm::None), 1.5);
}

TEST(SceneSimilarity, ZeroBeyondTheProximityGate) {
  const auto q = rec({1, 2});
  const std::vector<flie::ObservationRecord> cands{q};
  EXPECT_EQ(flie::scene_similarity(q, cands, 1.0001, 1.0), 0.0);
  EXPECT_EQ(flie::scene_similarity(q, cands, 1.0, 1.0), 1.0);
}

TEST(SceneSimilarity, StaysInUnitIntervalWithSetNorm) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> cell(0, 30);
  for (int trial = 0; trial < 500; ++trial) {
    auto make = [&] {
      std::set<std::uint64_t> s;
      for (int i = 0; i < 12; ++i) s.insert(cell(rng));
      return rec({s.begin(), s.end()});
    };
    const auto q = make();
    std::vector<flie::ObservationRecord> cands;
    for (int i = 0; i < 1 + trial % 5; ++i) cands.push_back(make());
    const double g = flie::scene_similarity(q, cands, 0.0, 1.0);
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, 1.0);
  }
}

TEST(SceneSimilarity, Errors) {
  try {
    flie::scene_similarity(rec({1}), {}, 0.0, 1.0);
    FAIL();
  } catch (const flie::Error& e) {
    EXPECT_EQ(e.code(), flie::Errc::EmptyCandidateSet);
  }
  const std::vector<flie::ObservationRecord> cands{rec({1})};
  EXPECT_THROW(flie::scene_similarity(rec({}), cands, 0.0, 1.0), std::invalid_argument);
}

TEST(SceneSimilarity, CustomMatcherIsUsed) {
  const std::vector<flie::ObservationRecord> cands{rec({7}), rec({8})};
  const flie::Matcher one = [](const auto&, const auto&) -> std::size_t { return 1; };
  EXPECT_DOUBLE_EQ(flie::scene_similarity(rec({1, 2}), cands, 0.0, 1.0, flie::SimilarityNorm::Set, one), 0.5);
}

TEST(ConsistencyWindow, AcceptsAfterConsecutiveDetections) {
  flie::ConsistencyWindow w(3);
  EXPECT_EQ(w.push(FovZone::Inside, true), Verdict::Pending);
  EXPECT_EQ(w.push(FovZone::Inside, true), Verdict::Pending);
  EXPECT_EQ(w.push(FovZone::Inside, true), Verdict::Accept);
  EXPECT_EQ(w.push(FovZone::Inside, false), Verdict::Accept);
}

TEST(ConsistencyWindow, MissInsideRejects) {
  flie::ConsistencyWindow w(3);
  w.push(FovZone::Inside, true);
  EXPECT_EQ(w.push(FovZone::Inside, false), Verdict::Reject);
  EXPECT_EQ(w.push(FovZone::Inside, true), Verdict::Reject);
}

TEST(ConsistencyWindow, MissNearTheEdgeRestarts) {
  flie::ConsistencyWindow w(3);
  w.push(FovZone::Inside, true);
  w.push(FovZone::Inside, true);
  EXPECT_EQ(w.push(FovZone::Margin, false), Verdict::Pending);
  EXPECT_EQ(w.count(), 0);
  w.push(FovZone::Inside, true);
  w.push(FovZone::Inside, true);
  EXPECT_EQ(w.push(FovZone::Inside, true), Verdict::Accept);
}

TEST(TrackSet, AssociatesByClassAndGate) {
  flie::TrackSet set(2, 1.0);
  const auto inside = [](const Eigen::Vector3d&) { return FovZone::Inside; };
  std::vector<flie::TrackObservation> frame{{"car", {0, 0, 0}, 0.5, 1.0, "a"},
                                            {"truck", {0.2, 0, 0}, 0.7, 1.0, "b"}};
  EXPECT_THAT(set.update(frame, inside), ::testing::IsEmpty());
  frame[0].estimate = {0.5, 0, 0};
  frame[0].confidence = 0.8;
  const auto accepted = set.update(frame, inside);
  EXPECT_THAT(accepted, ::testing::ElementsAre(0u, 1u));
  ASSERT_EQ(set.tracks().size(), 2u);
  EXPECT_DOUBLE_EQ(set.tracks()[0].best->confidence, 0.8);
}

TEST(PFGraph, PruneIsIdempotentAndSeparates) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(-3.0, 3.0);
  std::uniform_real_distribution<double> conf(0.1, 1.0);
  const std::vector<std::string> classes{"mirror", "door", "bumper"};
  for (int trial = 0; trial < 200; ++trial) {
    flie::PFGraph pf;
    for (lsg::NodeId p = 1; p <= 6; ++p) {
      pf.poses.push_back(p);
      for (int k = 0; k < 3; ++k) {
        pf.features.push_back({p, classes[(p + k) % 3], {pos(rng), pos(rng), 0.0}, conf(rng), 1.0});
      }
    }
    const auto once = flie::prune_pf_graph(pf);
    EXPECT_THAT(flie::check_pf_graph(once), ::testing::IsEmpty());
    EXPECT_EQ(flie::prune_pf_graph(once), once);
    EXPECT_LE(once.features.size(), pf.features.size());
  }
}

TEST(PFGraph, KeepsHigherConfidenceThenArea) {
  flie::PFGraph pf{{1, 2}, {{1, "door", {0, 0, 0}, 0.5, 9.0}, {2, "door", {1, 0, 0}, 0.5, 10.0}}};
  const auto out = flie::prune_pf_graph(pf);
  ASSERT_EQ(out.features.size(), 1u);
  EXPECT_EQ(out.features[0].pose, 2u);
  EXPECT_THAT(out.poses, ::testing::ElementsAre(2u));
}

// Distance from p to the axis-aligned box [-2,2]x[-1,1].
double box_distance(const Eigen::Vector2d& p) {
  const Eigen::Vector2d d = (p.cwiseAbs() - Eigen::Vector2d(2, 1)).cwiseMax(0.0);
  return d.norm();
}

TEST(ViewPoses, ClosedLoopFacingTheFootprint) {
  const lsg::ConvexPolygon2D box(std::vector<Eigen::Vector2d>{{-2, -1}, {2, -1}, {2, 1}, {-2, 1}});
  const auto poses = flie::plan_view_poses(box, 2.0, 1.0, Eigen::Vector2d(-10, 0));
  // Offset contour length: box perimeter plus a full circle of radius 2.
  const double length = 12.0 + 2.0 * std::numbers::pi * 2.0;
  ASSERT_EQ(static_cast<double>(poses.size()), std::ceil(length) + 1.0);
  EXPECT_NEAR((poses.front().xy - poses.back().xy).norm(), 0.0, 1e-9);
  EXPECT_NEAR(poses.front().xy.x(), -4.0, 1e-9);
  for (const auto& p : poses) {
    // Arcs of the contour are polylines.
    EXPECT_NEAR(box_distance(p.xy), 2.0, 0.02);
    const Eigen::Vector2d facing(std::cos(p.yaw), std::sin(p.yaw));
    EXPECT_LT(box_distance(p.xy + 2.0 * facing), 0.02);
  }
}

TEST(Levels, AerialRule) {
  flie::InspectionParams p;
  EXPECT_FALSE(flie::needs_next_level(1.5, 0, p, sim::Modality::Aerial));
  EXPECT_TRUE(flie::needs_next_level(1.9, 0, p, sim::Modality::Aerial));
  EXPECT_FALSE(flie::needs_next_level(3.2, 1, p, sim::Modality::Aerial));
  EXPECT_TRUE(flie::needs_next_level(3.4, 1, p, sim::Modality::Aerial));
  EXPECT_FALSE(flie::needs_next_level(3.4, 2, p, sim::Modality::Aerial));
  EXPECT_FALSE(flie::needs_next_level(30.0, 0, p, sim::Modality::Ground));
}

TEST(Params, JsonRoundTripAndValidation) {
  flie::MissionConfig c;
  c.params.horizon = 3;
  c.timing_repeats = 4;
  c.similarity_norm = flie::SimilarityNorm::None;
  const auto back = flie::mission_config_from_json(nlohmann::json::parse(flie::to_json(c).dump()));
  EXPECT_EQ(back.params.horizon, 3);
  EXPECT_EQ(back.timing_repeats, 4);
  EXPECT_EQ(back.similarity_norm, flie::SimilarityNorm::None);
  for (const char* bad : {R"({"timing_repeats": 0})", R"({"inspection": {"gamma_star": 1.5}})",
                          R"({"similarity_norm": "foo"})"}) {
    try {
      flie::mission_config_from_json(nlohmann::json::parse(bad));
      FAIL() << bad;
    } catch (const flie::Error& e) {
      EXPECT_EQ(e.code(), flie::Errc::InvalidConfig) << bad;
    }
  }
}

flie::MissionConfig ground_config(const bench::GeneratedWorld& g) {
  flie::MissionConfig c;
  c.modality = sim::Modality::Ground;
  c.noise = sim::NoiseSpec::none();
  c.start = g.start;
  c.start_yaw = g.start_yaw;
  return c;
}

TEST(Mission, TwoTargetsAreFullyInspected) {
  const auto g = bench::ring_world(2, 1);
  flie::Mission m(g.world, ground_config(g));
  m.run();
  ASSERT_EQ(m.graph().targets().size(), 2u);
  for (const auto& t : m.graph().targets()) {
    EXPECT_TRUE(t.inspected()) << t.label;
    EXPECT_EQ(t.levels->nodes.size(), 1u);
  }
  EXPECT_EQ(m.inspected_objects().size(), 2u);
  EXPECT_EQ(m.stats().invariant_violations, 0u);
  EXPECT_EQ(m.stats().gamma_out_of_range, 0u);
  EXPECT_EQ(m.stats().gamma_gate_violations, 0u);
  for (const auto& l : m.stats().levels) {
    EXPECT_FALSE(l.failsafe);
    EXPECT_LE(std::abs(l.closing_index - l.circuit_poses), 1);
  }
  EXPECT_EQ(m.events().back()["event"], "mission_end");
}

TEST(Mission, AerialTruckGetsSeveralLevels) {
  const auto g = bench::ring_world(2, 1);
  auto c = ground_config(g);
  c.modality = sim::Modality::Aerial;
  flie::Mission m(g.world, c);
  m.run();
  // Car 1.5 m tall: one level. Truck 3.2 m: two.
  std::map<std::string, std::size_t> levels;
  for (const auto& t : m.graph().targets()) levels[t.sem_class] = t.levels->nodes.size();
  EXPECT_EQ(levels["car"], 1u);
  EXPECT_EQ(levels["truck"], 2u);
}

TEST(Mission, StartOutsideTheWorldIsRejected) {
  const auto g = bench::ring_world(2, 1);
  auto c = ground_config(g);
  c.start = Eigen::Vector3d(1e4, 0, 0);
  EXPECT_THROW(flie::Mission(g.world, c), std::exception);
}

TEST(Mission, IsDeterministic) {
  const auto g = bench::ring_world(3, 4);
  auto c = ground_config(g);
  c.noise = sim::NoiseSpec{};
  c.noise.seed = 4;
  flie::Mission a(g.world, c);
  flie::Mission b(g.world, c);
  a.run();
  b.run();
  EXPECT_EQ(lsg::serialize(a.graph()), lsg::serialize(b.graph()));
  ASSERT_EQ(a.events().size(), b.events().size());
  for (std::size_t i = 0; i < a.events().size(); ++i) EXPECT_EQ(a.events()[i], b.events()[i]);
}

}  // namespace
