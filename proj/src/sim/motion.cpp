#include "xflie/sim/motion.hpp"

#include <cmath>

#include "xflie/sim/errors.hpp"

namespace xflie::sim {

StepResult step_to(const RobotState& robot, const lsg::Pose6& waypoint, const WorldSpec& world,
                   double step_len) {
  if (!(step_len > 0.0)) throw std::invalid_argument("step_to: step_len must be positive");
  if (!world.bounds.contains(waypoint.position)) {
    throw Error(Errc::OutOfBounds, "waypoint outside world bounds");
  }
  if (robot.modality == Modality::Ground && std::abs(waypoint.position.z() - world.ground_z) > 1e-9) {
    throw Error(Errc::OutOfBounds, "ground robot waypoint off the ground plane");
  }

  StepResult out;
  out.state = robot;
  const Eigen::Vector3d start = robot.pose.position;
  const Eigen::Vector3d delta = waypoint.position - start;
  out.distance = delta.norm();
  const bool rotates = !robot.pose.orientation.isApprox(waypoint.orientation, 1e-12);
  if (out.distance == 0.0 && !rotates) return out;

  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(out.distance / step_len - 1e-12)));
  out.trace.reserve(n);
  for (std::size_t i = 1; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n);
    out.trace.push_back({start + s * delta, robot.pose.orientation.slerp(s, waypoint.orientation)});
  }
  out.trace.push_back(waypoint);
  out.state.pose = waypoint;
  return out;
}

}  // namespace xflie::sim
