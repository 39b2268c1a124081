#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <json.hpp>

#include "xflie/lsg/graph.hpp"

namespace xflie::sim {

enum class Modality { Aerial, Ground };

const char* to_string(Modality m);
Modality modality_from_string(const std::string& s);

/// Pinhole camera with Brown-Conrady distortion (k1, k2, p1, p2, k3) applied
/// to normalized image coordinates. R and t map the body frame (x forward,
/// y left, z up) into the optical frame (x right, y down, z forward).
struct CameraModel {
  double fx = 500.0;
  double fy = 500.0;
  double cx = 320.0;
  double cy = 240.0;
  std::array<double, 5> D{0.0, 0.0, 0.0, 0.0, 0.0};
  Eigen::Matrix3d R = default_rotation();
  Eigen::Vector3d t = Eigen::Vector3d(0.0, 0.7, 0.0);
  int width = 640;
  int height = 480;
  double d_max = 20.0;

  static Eigen::Matrix3d default_rotation();

  /// Horizontal field of view, 2*atan(I_w / (2 f_x)).
  double hfov() const;
  double vfov() const;

  /// Camera center expressed in the body frame.
  Eigen::Vector3d mount_offset() const { return -R.transpose() * t; }

  /// Throws Error(InvalidCamera).
  void validate() const;
};

nlohmann::ordered_json to_json(const CameraModel& cam);
CameraModel camera_from_json(const nlohmann::json& j);

struct RobotState {
  lsg::Pose6 pose;
  Modality modality = Modality::Aerial;

  double yaw() const;
  static RobotState at(const Eigen::Vector3d& position, double yaw, Modality modality);
};

Eigen::Quaterniond yaw_quaternion(double yaw);

struct Projection {
  Eigen::Vector2d uv = Eigen::Vector2d::Zero();
  double depth = 0.0;
  bool valid = false;
};

Eigen::Vector3d world_to_camera(const Eigen::Vector3d& p_world, const CameraModel& cam,
                                const lsg::Pose6& pose);
Eigen::Vector3d camera_to_world(const Eigen::Vector3d& p_cam, const CameraModel& cam,
                                const lsg::Pose6& pose);
Eigen::Vector3d camera_center(const CameraModel& cam, const lsg::Pose6& pose);

/// Pixel coordinates of a camera-frame point; no validity checks.
Eigen::Vector2d project_camera_point(const Eigen::Vector3d& p_cam, const CameraModel& cam);

/// Invalid when behind the camera or outside [0, I_w) x [0, I_h).
std::vector<Projection> project_points(std::span<const Eigen::Vector3d> points_world,
                                       const CameraModel& cam, const RobotState& robot);

/// Unit-depth ray (x/z, y/z, 1) through a pixel, undistorting iteratively.
Eigen::Vector3d pixel_ray(const Eigen::Vector2d& uv, const CameraModel& cam);

/// World point at optical depth `depth` along the ray through `uv`.
Eigen::Vector3d back_project(const Eigen::Vector2d& uv, double depth, const CameraModel& cam,
                             const RobotState& robot);

/// Angle between the optical axis heading and the horizontal direction to `p`.
double horizontal_offset(const Eigen::Vector3d& p_world, const CameraModel& cam,
                         const lsg::Pose6& pose);

}  // namespace xflie::sim
