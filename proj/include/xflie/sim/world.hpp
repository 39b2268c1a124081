#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "xflie/lsg/polygon.hpp"

namespace xflie::sim {

struct Aabb {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();

  bool contains(const Eigen::Vector3d& p, double eps = 1e-9) const {
    return (p.array() >= min.array() - eps).all() && (p.array() <= max.array() + eps).all();
  }
};

struct GroundTruthFeature {
  std::string sem_class;
  Eigen::Vector3d anchor = Eigen::Vector3d::Zero();
  /// Nominal visible area in m^2.
  double area = 0.5;
  /// Footprint edge the anchor lies on; filled in by WorldSpec::validate().
  int face = -1;
};

struct GroundTruthTarget {
  std::string sem_class;
  lsg::ConvexPolygon2D footprint;
  double height = 1.0;
  std::vector<GroundTruthFeature> features;

  Eigen::Vector3d centroid(double ground_z) const;
  /// Outward unit normal of footprint edge `face` (edge i runs from vertex i to i+1).
  Eigen::Vector2d face_normal(int face) const;
  double perimeter() const;
};

struct WorldSpec {
  Aabb bounds;
  double ground_z = 0.0;
  std::vector<GroundTruthTarget> targets;
  std::uint64_t seed = 0;

  /// Checks containment and overlap rules and snaps feature faces.
  /// Throws Error(InvalidWorld).
  void validate();
};

/// Outward-offset contour of a convex footprint: edges pushed out by `d`,
/// corners rounded with arcs sampled every `arc_step` radians.
std::vector<Eigen::Vector2d> offset_contour(const lsg::ConvexPolygon2D& footprint, double d,
                                            double arc_step = 0.2);

/// Point in the xy plane is inside any footprint (optionally skipping one).
bool inside_any_footprint(const WorldSpec& world, const Eigen::Vector2d& p, int skip = -1);

nlohmann::ordered_json to_json(const WorldSpec& world);
WorldSpec world_from_json(const nlohmann::json& j);

}  // namespace xflie::sim
