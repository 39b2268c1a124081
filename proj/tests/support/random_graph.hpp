#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "xflie/lsg/graph.hpp"

namespace xflie::testing {

/// Random but structurally valid layered graph: a few Detected nodes and a few
/// Inspected ones with nested level/pose/feature graphs and inspected edges.
inline lsg::LayeredSemanticGraph random_graph(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-50.0, 50.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 6);
  const char* classes[] = {"car", "truck", "ambulance"};
  lsg::LayeredSemanticGraph g;
  const Eigen::Vector3d robot(pos(rng), pos(rng), 0.0);
  const int n = count(rng) + 1;
  std::vector<lsg::NodeId> inspected;
  for (int i = 0; i < n; ++i) {
    lsg::TargetObservation obs;
    obs.position = {pos(rng), pos(rng), unit(rng)};
    obs.sem_class = classes[rng() % 3];
    obs.confidence = unit(rng);
    obs.seg_area = 1.0 + 1000.0 * unit(rng);
    obs.image_ref = "img-" + std::to_string(i);
    const lsg::NodeId id = g.register_target(obs, robot);
    if (rng() % 2 == 0) continue;

    lsg::LevelGraph levels;
    const int nl = 1 + static_cast<int>(rng() % 2);
    std::vector<Eigen::Vector2d> ring;
    for (int k = 0; k < nl; ++k) {
      auto& level = levels.add_level(g.allocate_id(), obs.position + Eigen::Vector3d(3.0, 0.0, 1.5 * k));
      const int np = 3 + static_cast<int>(rng() % 5);
      for (int p = 0; p < np; ++p) {
        const double a = 2.0 * 3.141592653589793 * p / np;
        lsg::PoseNode pn;
        pn.id = g.allocate_id();
        pn.label = "Pose-" + std::to_string(p);
        pn.pose.position = obs.position + Eigen::Vector3d(3.0 * std::cos(a), 3.0 * std::sin(a), 1.5 * k);
        pn.pose.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(a + 3.14159, Eigen::Vector3d::UnitZ()));
        pn.image_ref = "img-p" + std::to_string(pn.id);
        const int nf = static_cast<int>(rng() % 3);
        for (int f = 0; f < nf; ++f) {
          lsg::FeatureNode fn;
          fn.id = g.allocate_id();
          fn.label = "door-" + std::to_string(f + 1);
          fn.sem_class = "door";
          fn.position = pn.pose.position + Eigen::Vector3d(unit(rng), unit(rng), unit(rng));
          fn.confidence = unit(rng);
          fn.seg_area = 1.0 + unit(rng);
          pn.features.nodes.push_back(fn);
        }
        level.append_pose(std::move(pn));
        if (k == 0) ring.push_back(level.poses.nodes.back().pose.position.head<2>());
      }
    }
    const auto hull = lsg::ConvexPolygon2D::hull_of(ring);
    g.mark_inspected(id, hull.vertices(), std::move(levels));
    for (const auto other : inspected) {
      if (rng() % 2 == 0) g.add_inspected_edge(id, other);
    }
    inspected.push_back(id);
  }
  if (rng() % 2 == 0) {
    lsg::Pose6 odom;
    odom.position = {pos(rng), pos(rng), 0.0};
    odom.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(unit(rng), Eigen::Vector3d::UnitZ()));
    g.refresh_root(odom);
  }
  return g;
}

}  // namespace xflie::testing
