#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "xflie/sim/world.hpp"

namespace xflie::bench {

struct GeneratedWorld {
  sim::WorldSpec world;
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  double start_yaw = 0.0;
};

/// Vehicles on a circle with 12 m between neighbouring centres, alternating
/// car (4.5 x 1.9 x 1.5) and truck (6.0 x 2.4 x 3.2), long axis tangential.
/// The robot starts 8 m inside the ring (or at its centre), facing outward.
GeneratedWorld ring_world(int targets, std::uint64_t seed = 0);

/// Car or truck footprint and features centred at `center`, long axis along `heading`.
sim::GroundTruthTarget make_vehicle(bool truck, const Eigen::Vector2d& center, double heading);

}  // namespace xflie::bench
