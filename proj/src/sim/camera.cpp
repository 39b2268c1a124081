#include "xflie/sim/camera.hpp"

#include <cmath>
#include <numbers>

#include "xflie/sim/errors.hpp"

namespace xflie::sim {

const char* to_string(Modality m) { return m == Modality::Aerial ? "aerial" : "ground"; }

Modality modality_from_string(const std::string& s) {
  if (s == "aerial" || s == "Aerial") return Modality::Aerial;
  if (s == "ground" || s == "Ground") return Modality::Ground;
  throw std::invalid_argument("unknown modality '" + s + "'");
}

Eigen::Matrix3d CameraModel::default_rotation() {
  Eigen::Matrix3d r;
  r << 0, -1, 0,
       0, 0, -1,
       1, 0, 0;
  return r;
}

double CameraModel::hfov() const { return 2.0 * std::atan(width / (2.0 * fx)); }
double CameraModel::vfov() const { return 2.0 * std::atan(height / (2.0 * fy)); }

void CameraModel::validate() const {
  if (!(fx > 0.0 && fy > 0.0)) throw Error(Errc::InvalidCamera, "focal lengths must be positive");
  if (!(cx > 0.0 && cx < width && cy > 0.0 && cy < height)) {
    throw Error(Errc::InvalidCamera, "principal point outside the image");
  }
  if (!(d_max > 0.0)) throw Error(Errc::InvalidCamera, "d_max must be positive");
  if (!(R * R.transpose()).isIdentity(1e-9) || std::abs(R.determinant() - 1.0) > 1e-9) {
    throw Error(Errc::InvalidCamera, "R is not a rotation");
  }
}

nlohmann::ordered_json to_json(const CameraModel& cam) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({cam.R(r, 0), cam.R(r, 1), cam.R(r, 2)});
  return {{"fx", cam.fx},       {"fy", cam.fy},
          {"cx", cam.cx},       {"cy", cam.cy},
          {"D", cam.D},         {"R", std::move(rows)},
          {"t", {cam.t.x(), cam.t.y(), cam.t.z()}},
          {"width", cam.width}, {"height", cam.height},
          {"d_max", cam.d_max}};
}

CameraModel camera_from_json(const nlohmann::json& j) {
  CameraModel cam;
  try {
    cam.fx = j.value("fx", cam.fx);
    cam.fy = j.value("fy", cam.fy);
    cam.width = j.value("width", cam.width);
    cam.height = j.value("height", cam.height);
    cam.cx = j.value("cx", cam.width / 2.0);
    cam.cy = j.value("cy", cam.height / 2.0);
    cam.d_max = j.value("d_max", cam.d_max);
    if (j.contains("D")) cam.D = j.at("D").get<std::array<double, 5>>();
    if (j.contains("R")) {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) cam.R(r, c) = j.at("R").at(r).at(c).get<double>();
      }
    }
    if (j.contains("t")) {
      const auto& t = j.at("t");
      cam.t = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidCamera, e.what());
  }
  cam.validate();
  return cam;
}

Eigen::Quaterniond yaw_quaternion(double yaw) {
  return Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
}

double RobotState::yaw() const {
  const Eigen::Vector3d fwd = pose.orientation * Eigen::Vector3d::UnitX();
  return std::atan2(fwd.y(), fwd.x());
}

RobotState RobotState::at(const Eigen::Vector3d& position, double yaw, Modality modality) {
  RobotState r;
  r.pose.position = position;
  r.pose.orientation = yaw_quaternion(yaw);
  r.modality = modality;
  return r;
}

Eigen::Vector3d world_to_camera(const Eigen::Vector3d& p_world, const CameraModel& cam,
                                const lsg::Pose6& pose) {
  const Eigen::Vector3d p_body = pose.orientation.conjugate() * (p_world - pose.position);
  return cam.R * p_body + cam.t;
}

Eigen::Vector3d camera_to_world(const Eigen::Vector3d& p_cam, const CameraModel& cam,
                                const lsg::Pose6& pose) {
  const Eigen::Vector3d p_body = cam.R.transpose() * (p_cam - cam.t);
  return pose.orientation * p_body + pose.position;
}

Eigen::Vector3d camera_center(const CameraModel& cam, const lsg::Pose6& pose) {
  return pose.orientation * cam.mount_offset() + pose.position;
}

namespace {

Eigen::Vector2d distort(const Eigen::Vector2d& xy, const std::array<double, 5>& D) {
  const double x = xy.x();
  const double y = xy.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + D[0] * r2 + D[1] * r2 * r2 + D[4] * r2 * r2 * r2;
  return {x * radial + 2.0 * D[2] * x * y + D[3] * (r2 + 2.0 * x * x),
          y * radial + D[2] * (r2 + 2.0 * y * y) + 2.0 * D[3] * x * y};
}

}  // namespace

Eigen::Vector2d project_camera_point(const Eigen::Vector3d& p_cam, const CameraModel& cam) {
  const Eigen::Vector2d d = distort(p_cam.head<2>() / p_cam.z(), cam.D);
  return {cam.fx * d.x() + cam.cx, cam.fy * d.y() + cam.cy};
}

std::vector<Projection> project_points(std::span<const Eigen::Vector3d> points_world,
                                       const CameraModel& cam, const RobotState& robot) {
  std::vector<Projection> out;
  out.reserve(points_world.size());
  for (const auto& p : points_world) {
    Projection pr;
    const Eigen::Vector3d pc = world_to_camera(p, cam, robot.pose);
    pr.depth = pc.z();
    if (pc.z() > 1e-9) {
      pr.uv = project_camera_point(pc, cam);
      pr.valid = pr.uv.x() >= 0.0 && pr.uv.x() < cam.width && pr.uv.y() >= 0.0 &&
                 pr.uv.y() < cam.height;
    }
    out.push_back(pr);
  }
  return out;
}

Eigen::Vector3d pixel_ray(const Eigen::Vector2d& uv, const CameraModel& cam) {
  const Eigen::Vector2d xd((uv.x() - cam.cx) / cam.fx, (uv.y() - cam.cy) / cam.fy);
  Eigen::Vector2d x = xd;
  const bool has_distortion = std::any_of(cam.D.begin(), cam.D.end(), [](double c) { return c != 0.0; });
  if (has_distortion) {
    for (int it = 0; it < 50; ++it) {
      const Eigen::Vector2d err = distort(x, cam.D) - xd;
      x -= err;
      if (err.norm() < 1e-14) break;
    }
  }
  return {x.x(), x.y(), 1.0};
}

Eigen::Vector3d back_project(const Eigen::Vector2d& uv, double depth, const CameraModel& cam,
                             const RobotState& robot) {
  return camera_to_world(pixel_ray(uv, cam) * depth, cam, robot.pose);
}

double horizontal_offset(const Eigen::Vector3d& p_world, const CameraModel& cam,
                         const lsg::Pose6& pose) {
  const Eigen::Vector3d fwd = pose.orientation * (cam.R.transpose() * Eigen::Vector3d::UnitZ());
  const Eigen::Vector3d dir = p_world - camera_center(cam, pose);
  double diff = std::atan2(dir.y(), dir.x()) - std::atan2(fwd.y(), fwd.x());
  diff = std::remainder(diff, 2.0 * std::numbers::pi);
  return std::abs(diff);
}

}  // namespace xflie::sim
