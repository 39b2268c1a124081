#include "xflie/sim/sensing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>

#include "xflie/lsg/errors.hpp"
#include "xflie/sim/errors.hpp"

namespace xflie::sim {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix(h ^ splitmix(v)); }

std::uint64_t pose_hash(std::uint64_t seed, const lsg::Pose6& pose, std::uint64_t tag) {
  std::uint64_t h = mix(splitmix(seed), tag);
  for (int i = 0; i < 3; ++i) h = mix(h, std::bit_cast<std::uint64_t>(pose.position[i] + 0.0));
  const auto& c = pose.orientation.coeffs();
  for (int i = 0; i < 4; ++i) h = mix(h, std::bit_cast<std::uint64_t>(c[i] + 0.0));
  return h;
}

double draw_confidence(const NoiseSpec& noise, std::mt19937_64& rng) {
  if (noise.confidence_jitter <= 0.0) return 1.0;
  std::gamma_distribution<double> ga(2.0, 1.0);
  std::gamma_distribution<double> gb(5.0, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  const double beta = x / (x + y);
  return std::clamp(1.0 - noise.confidence_jitter * beta, noise.confidence_floor, 1.0);
}

// Ray-interval of an extruded convex footprint: intersection of the xy prism
// and the z slab. Returns the entry parameter along `dir` (unit not required).
bool ray_hit_prism(const GroundTruthTarget& t, double ground_z, const Eigen::Vector3d& origin,
                   const Eigen::Vector3d& dir, double t_max, double& t_hit) {
  const Eigen::Vector3d end = origin + dir * t_max;
  double xy_in = 0.0;
  double xy_out = 1.0;
  if (!lsg::clip_segment(t.footprint.vertices(), origin.head<2>(), end.head<2>(), xy_in, xy_out)) {
    return false;
  }
  double z_in = 0.0;
  double z_out = 1.0;
  const double dz = end.z() - origin.z();
  const double lo = ground_z;
  const double hi = ground_z + t.height;
  if (std::abs(dz) < 1e-15) {
    if (origin.z() < lo || origin.z() > hi) return false;
  } else {
    double a = (lo - origin.z()) / dz;
    double b = (hi - origin.z()) / dz;
    if (a > b) std::swap(a, b);
    z_in = std::max(0.0, a);
    z_out = std::min(1.0, b);
  }
  const double in = std::max(xy_in, z_in);
  const double out = std::min(xy_out, z_out);
  if (in > out) return false;
  t_hit = in * t_max;
  return true;
}

// x-extent of a ring (polygon, segment or point) inside the band y0 <= y <= y1.
bool band_extent(const std::vector<Eigen::Vector2d>& ring, double y0, double y1, double& xmin,
                 double& xmax) {
  xmin = std::numeric_limits<double>::infinity();
  xmax = -xmin;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d a = ring[i];
    const Eigen::Vector2d b = ring[(i + 1) % n];
    // Clip edge a-b to the band.
    double t0 = 0.0;
    double t1 = 1.0;
    const double dy = b.y() - a.y();
    if (std::abs(dy) < 1e-15) {
      if (a.y() < y0 || a.y() > y1) continue;
    } else {
      double s0 = (y0 - a.y()) / dy;
      double s1 = (y1 - a.y()) / dy;
      if (s0 > s1) std::swap(s0, s1);
      t0 = std::max(t0, s0);
      t1 = std::min(t1, s1);
      if (t0 > t1) continue;
    }
    for (double t : {t0, t1}) {
      const double x = a.x() + t * (b.x() - a.x());
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
    }
  }
  return xmin <= xmax;
}

}  // namespace

nlohmann::ordered_json to_json(const NoiseSpec& noise) {
  return {{"confidence_floor", noise.confidence_floor},
          {"confidence_jitter", noise.confidence_jitter},
          {"position_sigma", noise.position_sigma},
          {"dropout", noise.dropout},
          {"desync_frames", noise.desync_frames},
          {"seed", noise.seed}};
}

NoiseSpec noise_from_json(const nlohmann::json& j) {
  NoiseSpec n;
  if (j.is_string() && j.get<std::string>() == "none") return NoiseSpec::none();
  n.confidence_floor = j.value("confidence_floor", n.confidence_floor);
  n.confidence_jitter = j.value("confidence_jitter", n.confidence_jitter);
  n.position_sigma = j.value("position_sigma", n.position_sigma);
  n.dropout = j.value("dropout", n.dropout);
  n.desync_frames = j.value("desync_frames", n.desync_frames);
  n.seed = j.value("seed", n.seed);
  if (!(n.confidence_floor >= 0.0 && n.confidence_floor <= 1.0) || n.position_sigma < 0.0 ||
      !(n.dropout >= 0.0 && n.dropout <= 1.0) || n.desync_frames < 0) {
    throw std::invalid_argument("noise spec out of range");
  }
  return n;
}

// --- Mask ------------------------------------------------------------------

Mask Mask::convex_fill(std::span<const Eigen::Vector2d> pixels, int width, int height) {
  Mask m;
  if (pixels.empty()) return m;
  std::vector<Eigen::Vector2d> ring;
  try {
    ring = lsg::ConvexPolygon2D::hull_of(pixels).vertices();
  } catch (const lsg::Error&) {
    // Collinear or coincident input: use the extreme points as a degenerate ring.
    auto [lo, hi] = std::minmax_element(pixels.begin(), pixels.end(), [](const auto& a, const auto& b) {
      return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    ring = {*lo, *hi};
  }
  double ymin = ring.front().y();
  double ymax = ymin;
  for (const auto& p : ring) {
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  const int v0 = std::max(0, static_cast<int>(std::ceil(ymin - 0.5)));
  const int v1 = std::min(height - 1, static_cast<int>(std::floor(ymax + 0.5)));
  for (int v = v0; v <= v1; ++v) {
    double xmin = 0.0;
    double xmax = 0.0;
    if (!band_extent(ring, v - 0.5, v + 0.5, xmin, xmax)) continue;
    const int u0 = std::max(0, static_cast<int>(std::ceil(xmin - 0.5)));
    const int u1 = std::min(width - 1, static_cast<int>(std::floor(xmax + 0.5)));
    if (u0 <= u1) m.spans_.push_back({v, u0, u1 + 1});
  }
  return m;
}

Mask Mask::square(const Eigen::Vector2i& center, int side, int width, int height) {
  Mask m;
  const int half = side / 2;
  const int u0 = std::max(0, center.x() - half);
  const int u1 = std::min(width - 1, center.x() - half + side - 1);
  const int v0 = std::max(0, center.y() - half);
  const int v1 = std::min(height - 1, center.y() - half + side - 1);
  if (u0 > u1) return m;
  for (int v = v0; v <= v1; ++v) m.spans_.push_back({v, u0, u1 + 1});
  return m;
}

bool Mask::contains(int u, int v) const {
  auto it = std::lower_bound(spans_.begin(), spans_.end(), v,
                             [](const Span& s, int row) { return s.v < row; });
  return it != spans_.end() && it->v == v && u >= it->u_begin && u < it->u_end;
}

bool Mask::contains(const Eigen::Vector2d& uv) const {
  return contains(static_cast<int>(std::lround(uv.x())), static_cast<int>(std::lround(uv.y())));
}

std::int64_t Mask::area() const {
  std::int64_t a = 0;
  for (const auto& s : spans_) a += s.u_end - s.u_begin;
  return a;
}

Eigen::Vector4i Mask::bbox() const {
  if (spans_.empty()) return Eigen::Vector4i::Zero();
  Eigen::Vector4i b(spans_.front().u_begin, spans_.front().v, spans_.front().u_end - 1,
                    spans_.back().v);
  for (const auto& s : spans_) {
    b[0] = std::min(b[0], s.u_begin);
    b[2] = std::max(b[2], s.u_end - 1);
  }
  return b;
}

// --- geometry helpers ------------------------------------------------------

bool segment_occluded(const WorldSpec& world, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                      int skip, int skip2) {
  for (std::size_t i = 0; i < world.targets.size(); ++i) {
    if (static_cast<int>(i) == skip || static_cast<int>(i) == skip2) continue;
    const auto& t = world.targets[i];
    double t_in = 0.0;
    double t_out = 1.0;
    if (!lsg::clip_segment(t.footprint.vertices(), a.head<2>(), b.head<2>(), t_in, t_out)) continue;
    if (t_out - t_in <= 1e-9) continue;
    const double za = a.z() + t_in * (b.z() - a.z());
    const double zb = a.z() + t_out * (b.z() - a.z());
    if (std::min(za, zb) <= world.ground_z + t.height && std::max(za, zb) >= world.ground_z) {
      return true;
    }
  }
  return false;
}

SurfaceSample sample_visible_surface(const WorldSpec& world, int target, const CameraModel& cam,
                                     const lsg::Pose6& pose, double spacing) {
  SurfaceSample out;
  const auto& t = world.targets.at(target);
  const Eigen::Vector3d c = camera_center(cam, pose);
  const auto& v = t.footprint.vertices();
  const std::size_t n = v.size();
  for (std::size_t e = 0; e < n; ++e) {
    const Eigen::Vector2d a = v[e];
    const Eigen::Vector2d b = v[(e + 1) % n];
    const Eigen::Vector2d normal = t.face_normal(static_cast<int>(e));
    if (normal.dot(c.head<2>() - 0.5 * (a + b)) <= 1e-9) continue;
    const double len = (b - a).norm();
    const int nu = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    const int nv = std::max(1, static_cast<int>(std::ceil(t.height / spacing)));
    const double w = (len / nu) * (t.height / nv);
    for (int i = 0; i < nu; ++i) {
      const Eigen::Vector2d p = a + (b - a) * ((i + 0.5) / nu);
      for (int k = 0; k < nv; ++k) {
        out.points.emplace_back(p.x(), p.y(), world.ground_z + t.height * (k + 0.5) / nv);
        out.weights.push_back(w);
      }
    }
  }
  const double top = world.ground_z + t.height;
  if (c.z() > top) {
    Eigen::Vector2d lo = v.front();
    Eigen::Vector2d hi = v.front();
    for (const auto& p : v) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    for (double x = lo.x() + 0.5 * spacing; x < hi.x(); x += spacing) {
      for (double y = lo.y() + 0.5 * spacing; y < hi.y(); y += spacing) {
        if (!t.footprint.contains({x, y}, 0.0)) continue;
        out.points.emplace_back(x, y, top);
        out.weights.push_back(spacing * spacing);
      }
    }
  }
  return out;
}

// --- sensing ---------------------------------------------------------------

std::vector<Detection> sense(const WorldSpec& world, const RobotState& robot,
                             const CameraModel& cam, SenseMode mode, const NoiseSpec& noise,
                             std::optional<int> focus) {
  std::vector<Detection> out;
  std::mt19937_64 rng(pose_hash(noise.seed, robot.pose, mode == SenseMode::Exploration ? 1 : 2));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Vector3d c = camera_center(cam, robot.pose);
  const double half_fov = 0.5 * cam.hfov();

  auto finish = [&](Detection det) {
    // One draw per candidate, dropped or not.
    const double drop = unit(rng);
    const double conf = draw_confidence(noise, rng);
    if (drop < noise.dropout || det.mask.empty()) return;
    const Eigen::Vector4i bb = det.mask.bbox();
    det.bbox_center = Eigen::Vector2d(0.5 * (bb[0] + bb[2]), 0.5 * (bb[1] + bb[3]));
    det.bbox_w = bb[2] - bb[0] + 1;
    det.bbox_h = bb[3] - bb[1] + 1;
    det.seg_area = static_cast<double>(det.mask.area());
    det.confidence = conf;
    out.push_back(std::move(det));
  };

  for (std::size_t i = 0; i < world.targets.size(); ++i) {
    const auto& t = world.targets[i];
    const int ti = static_cast<int>(i);
    if (mode == SenseMode::Exploration) {
      const Eigen::Vector3d centroid = t.centroid(world.ground_z);
      if ((centroid - c).norm() > cam.d_max) continue;
      if (horizontal_offset(centroid, cam, robot.pose) > half_fov) continue;
      if (segment_occluded(world, c, centroid, ti)) continue;
      const SurfaceSample s = sample_visible_surface(world, ti, cam, robot.pose);
      std::vector<Eigen::Vector2d> px;
      for (const auto& p : project_points(s.points, cam, robot)) {
        if (p.valid) px.push_back(p.uv);
      }
      Detection det;
      det.sem_class = t.sem_class;
      det.gt_target = ti;
      det.mask = Mask::convex_fill(px, cam.width, cam.height);
      finish(std::move(det));
      continue;
    }

    if (focus && *focus != ti) continue;
    for (std::size_t k = 0; k < t.features.size(); ++k) {
      const auto& f = t.features[k];
      const Eigen::Vector2d n = t.face_normal(f.face);
      const Eigen::Vector3d to_cam = c - f.anchor;
      if (n.dot(to_cam.head<2>()) <= 1e-9) continue;
      const double dist = to_cam.norm();
      if (dist > cam.d_max) continue;
      const Eigen::Vector3d pc = world_to_camera(f.anchor, cam, robot.pose);
      if (pc.z() <= 1e-9) continue;
      const Eigen::Vector2d uv = project_camera_point(pc, cam);
      if (!(uv.x() >= 0.0 && uv.x() < cam.width && uv.y() >= 0.0 && uv.y() < cam.height)) continue;
      if (segment_occluded(world, c, f.anchor, ti)) continue;
      const double cos_theta = n.dot(to_cam.head<2>()) / dist;
      const double px_area = f.area * cam.fx * cam.fy * cos_theta / (dist * dist);
      const int side = 2 * static_cast<int>(std::sqrt(px_area) / 2.0) + 1;
      Detection det;
      det.sem_class = f.sem_class;
      det.gt_target = ti;
      det.gt_feature = static_cast<int>(k);
      det.mask = Mask::square({static_cast<int>(std::lround(uv.x())), static_cast<int>(std::lround(uv.y()))},
                              side, cam.width, cam.height);
      finish(std::move(det));
    }
  }
  return out;
}

Eigen::Vector3d localize_from_points(const Mask& mask, std::span<const Eigen::Vector3d> points_world,
                                     const CameraModel& cam, const RobotState& robot,
                                     std::span<const double> weights) {
  if (!weights.empty() && weights.size() != points_world.size()) {
    throw std::invalid_argument("localize_from_points: weights size mismatch");
  }
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  double wsum = 0.0;
  const auto proj = project_points(points_world, cam, robot);
  for (std::size_t i = 0; i < proj.size(); ++i) {
    if (!proj[i].valid || !mask.contains(proj[i].uv)) continue;
    const double w = weights.empty() ? 1.0 : weights[i];
    acc += w * world_to_camera(points_world[i], cam, robot.pose);
    wsum += w;
  }
  if (wsum <= 0.0) throw Error(Errc::NoSupportingPoints, "mask holds no projected points");
  return camera_to_world(acc / wsum, cam, robot.pose);
}

Eigen::Vector3d localize_semantic(const Detection& det, SensorMode sensor, const WorldSpec& world,
                                  const RobotState& robot, const CameraModel& cam,
                                  const NoiseSpec& noise) {
  if (det.mask.empty()) throw Error(Errc::NoSupportingPoints, "empty mask");
  if (det.gt_target < 0 || det.gt_target >= static_cast<int>(world.targets.size())) {
    throw Error(Errc::NoSupportingPoints, "detection without a surface");
  }
  Eigen::Vector3d est;
  if (sensor == SensorMode::LidarProjection) {
    const SurfaceSample s = sample_visible_surface(world, det.gt_target, cam, robot.pose);
    est = localize_from_points(det.mask, s.points, cam, robot, s.weights);
  } else {
    const auto& t = world.targets[det.gt_target];
    const Eigen::Vector3d origin = camera_center(cam, robot.pose);
    const Eigen::Vector4i bb = det.mask.bbox();
    const std::int64_t area = det.mask.area();
    const int stride = std::max(1, static_cast<int>(std::ceil(std::sqrt(area / 1024.0))));
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    std::size_t count = 0;
    // Lattice anchored at the bbox center.
    const int cu = (bb[0] + bb[2]) / 2;
    const int cv = (bb[1] + bb[3]) / 2;
    for (const auto& s : det.mask.spans()) {
      if (((s.v - cv) % stride) != 0) continue;
      int u = s.u_begin + ((cu - s.u_begin) % stride + stride) % stride;
      for (; u < s.u_end; u += stride) {
        const Eigen::Vector3d ray_cam = pixel_ray({static_cast<double>(u), static_cast<double>(s.v)}, cam);
        const Eigen::Vector3d dir = camera_to_world(ray_cam, cam, robot.pose) - origin;
        double depth_t = 0.0;
        if (!ray_hit_prism(t, world.ground_z, origin, dir, cam.d_max * 2.0, depth_t)) continue;
        acc += ray_cam * depth_t;  // camera frame: ray has unit z, so depth_t is the depth
        ++count;
      }
    }
    if (count == 0) throw Error(Errc::NoSupportingPoints, "no depth returns inside mask");
    est = camera_to_world(acc / static_cast<double>(count), cam, robot.pose);
  }
  if (noise.position_sigma > 0.0) {
    const auto tag = 0x10000ULL + static_cast<std::uint64_t>(det.gt_target) * 4096ULL +
                     static_cast<std::uint64_t>(det.gt_feature + 1);
    std::mt19937_64 rng(pose_hash(noise.seed, robot.pose, tag));
    std::normal_distribution<double> g(0.0, noise.position_sigma);
    const double dx = g(rng);
    const double dy = g(rng);
    const double dz = g(rng);
    est += Eigen::Vector3d(dx, dy, dz);
  }
  return est;
}

std::vector<std::uint64_t> observe_surface_cells(const WorldSpec& world, int target,
                                                 const RobotState& robot, const CameraModel& cam,
                                                 double cell, double view_bin_deg) {
  std::vector<std::uint64_t> keys;
  const auto& t = world.targets.at(target);
  const Eigen::Vector3d c = camera_center(cam, robot.pose);
  const auto& v = t.footprint.vertices();
  const std::size_t n = v.size();
  const int nv = std::max(1, static_cast<int>(std::ceil(t.height / cell)));
  for (std::size_t e = 0; e < n; ++e) {
    const Eigen::Vector2d a = v[e];
    const Eigen::Vector2d b = v[(e + 1) % n];
    const Eigen::Vector2d normal = t.face_normal(static_cast<int>(e));
    if (normal.dot(c.head<2>() - 0.5 * (a + b)) <= 1e-9) continue;
    const int nu = std::max(1, static_cast<int>(std::ceil((b - a).norm() / cell)));
    for (int i = 0; i < nu; ++i) {
      const Eigen::Vector2d p = a + (b - a) * ((i + 0.5) / nu);
      for (int k = 0; k < nv; ++k) {
        const Eigen::Vector3d q(p.x(), p.y(), world.ground_z + t.height * (k + 0.5) / nv);
        if ((q - c).norm() > cam.d_max) continue;
        const Eigen::Vector3d pc = world_to_camera(q, cam, robot.pose);
        if (pc.z() <= 1e-9) continue;
        const Eigen::Vector2d uv = project_camera_point(pc, cam);
        if (!(uv.x() >= 0.0 && uv.x() < cam.width && uv.y() >= 0.0 && uv.y() < cam.height)) continue;
        if (segment_occluded(world, c, q, target)) continue;
        std::uint64_t bin = 0;
        if (view_bin_deg > 0.0) {
          const double bearing = std::atan2(q.y() - c.y(), q.x() - c.x()) * 180.0 / std::numbers::pi + 180.0;
          bin = static_cast<std::uint64_t>(std::floor(bearing / view_bin_deg)) + 1;
        }
        keys.push_back((bin << 52) | (static_cast<std::uint64_t>(e) << 40) |
                       (static_cast<std::uint64_t>(i) << 20) | static_cast<std::uint64_t>(k));
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace xflie::sim
