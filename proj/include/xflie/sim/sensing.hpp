#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "xflie/sim/camera.hpp"
#include "xflie/sim/world.hpp"

namespace xflie::sim {

/// Detector and localization noise. `none()` gives an ideal sensor.
struct NoiseSpec {
  double confidence_floor = 0.6;
  /// Scale of the downward confidence jitter; 0 disables it.
  double confidence_jitter = 0.4;
  double position_sigma = 0.15;
  double dropout = 0.05;
  /// Localization uses the pose from this many frames earlier.
  int desync_frames = 0;
  std::uint64_t seed = 0;

  static NoiseSpec none() { return {0.6, 0.0, 0.0, 0.0, 0, 0}; }
  bool ideal() const { return confidence_jitter == 0.0 && position_sigma == 0.0 && dropout == 0.0; }
};

nlohmann::ordered_json to_json(const NoiseSpec& noise);
NoiseSpec noise_from_json(const nlohmann::json& j);

/// Binary segmentation mask stored as one half-open pixel span per row.
class Mask {
 public:
  struct Span {
    int v = 0;
    int u_begin = 0;
    int u_end = 0;
    bool operator==(const Span&) const = default;
  };

  /// Filled convex region spanned by `pixels`, clipped to the image.
  static Mask convex_fill(std::span<const Eigen::Vector2d> pixels, int width, int height);
  /// Axis-aligned square of side `side` px centered on pixel `center`, clipped.
  static Mask square(const Eigen::Vector2i& center, int side, int width, int height);

  bool contains(int u, int v) const;
  bool contains(const Eigen::Vector2d& uv) const;
  std::int64_t area() const;
  bool empty() const { return spans_.empty(); }
  const std::vector<Span>& spans() const { return spans_; }

  /// Bounding box as (u_min, v_min, u_max, v_max), inclusive.
  Eigen::Vector4i bbox() const;

  bool operator==(const Mask&) const = default;

 private:
  std::vector<Span> spans_;
};

struct Detection {
  Eigen::Vector2d bbox_center = Eigen::Vector2d::Zero();
  double bbox_w = 0.0;
  double bbox_h = 0.0;
  std::string sem_class;
  double confidence = 1.0;
  double seg_area = 0.0;
  Mask mask;
  /// Ground-truth bookkeeping: target index, and feature index for features.
  int gt_target = -1;
  int gt_feature = -1;
};

enum class SenseMode { Exploration, Inspection };
enum class SensorMode { LidarProjection, AlignedDepth };

/// One frame of the synthetic detector. In Inspection mode only the features
/// of `focus` are reported when it is set. Deterministic in
/// (world, pose, mode, noise.seed).
std::vector<Detection> sense(const WorldSpec& world, const RobotState& robot,
                             const CameraModel& cam, SenseMode mode, const NoiseSpec& noise,
                             std::optional<int> focus = std::nullopt);

/// Centroid of the points whose projections fall in the mask, computed in the
/// camera frame and moved back to the world frame. Throws NoSupportingPoints.
Eigen::Vector3d localize_from_points(const Mask& mask, std::span<const Eigen::Vector3d> points_world,
                                     const CameraModel& cam, const RobotState& robot,
                                     std::span<const double> weights = {});

/// Full localization for a detection produced by sense(). Gaussian position
/// noise is added last. Throws NoSupportingPoints.
Eigen::Vector3d localize_semantic(const Detection& det, SensorMode sensor, const WorldSpec& world,
                                  const RobotState& robot, const CameraModel& cam,
                                  const NoiseSpec& noise);

/// Surface sample of the faces of `target` that face the camera. Weights are
/// the represented patch areas.
struct SurfaceSample {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;
};
SurfaceSample sample_visible_surface(const WorldSpec& world, int target, const CameraModel& cam,
                                     const lsg::Pose6& pose, double spacing = 0.2);

/// True when the straight segment a->b crosses an extruded footprint other
/// than `skip` and `skip2` (2.5D test).
bool segment_occluded(const WorldSpec& world, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                      int skip = -1, int skip2 = -1);

/// Keys of the surface cells of `target` seen from the pose: side faces are
/// binned into `cell` x `cell` patches. With `view_bin_deg` > 0 the key also
/// carries the world bearing of the cell from the camera, quantised to that
/// bin width, so the same patch seen from a different direction does not
/// match. Sorted ascending.
std::vector<std::uint64_t> observe_surface_cells(const WorldSpec& world, int target,
                                                 const RobotState& robot, const CameraModel& cam,
                                                 double cell = 0.5, double view_bin_deg = 0.0);

}  // namespace xflie::sim
