#pragma once

#include <vector>

#include "xflie/sim/camera.hpp"
#include "xflie/sim/world.hpp"

namespace xflie::sim {

struct StepResult {
  RobotState state;
  /// Intermediate poses, ceil(d / step_len) of them; the last equals the waypoint.
  std::vector<lsg::Pose6> trace;
  double distance = 0.0;
};

/// Straight-line move sampled every `step_len` meters. Throws OutOfBounds
/// when the waypoint leaves the world or a Ground robot leaves the ground plane.
StepResult step_to(const RobotState& robot, const lsg::Pose6& waypoint, const WorldSpec& world,
                   double step_len = 0.5);

}  // namespace xflie::sim
