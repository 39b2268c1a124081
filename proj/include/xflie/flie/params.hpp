#pragma once

#include <cstdint>

#include <Eigen/Core>
#include <json.hpp>

#include "xflie/sim/camera.hpp"
#include "xflie/sim/sensing.hpp"

namespace xflie::flie {

struct UtilityWeights {
  double s_p = 50.0;
  double s_a = 5.0;
  double s_n = 5.0;

  void validate() const;
};

struct InspectionParams {
  double standoff = 2.0;
  double lateral_step = 1.0;
  double level_increment = 1.5;
  double vertical_overlap = 0.3;
  /// Level-0 flight height above ground for aerial robots.
  double base_altitude = 0.3;
  double gamma_star = 0.5;
  /// Similarity horizon: the first N observation records of a level.
  int horizon = 2;
  /// Surface-cell size and bearing bin of the simulated keypoint matcher.
  double match_cell = 0.5;
  double match_bearing_bin_deg = 30.0;
  /// Scene similarity is evaluated once this fraction of the orbit has been flown.
  double travel_fraction = 0.75;
  /// Scene-similarity proximity radius to the level node, as a fraction of the orbit length.
  double proximity_fraction = 0.25;
  double d_target_check = 5.0;
  double d_feature_check = 1.5;
  int consistency_window = 3;
  double sweep_step_deg = 15.0;
  /// Extra sweep beyond a full turn so targets near the start yaw complete a window.
  double sweep_overlap_deg = 45.0;
  /// Failsafe: a level is closed after this many circuits.
  int max_circuits = 2;
  /// Association gate for consistency tracks and ground-truth lookup, meters.
  double association_gate = 3.0;
  /// Consistency tracks closer than this to the FOV edge may miss without rejection.
  double fov_margin_deg = 10.0;
  int local_explore_stations = 4;
  double step_len = 0.5;

  void validate() const;
};

enum class SimilarityNorm { Set, None };

const char* to_string(SimilarityNorm n);
SimilarityNorm similarity_norm_from_string(const std::string& s);

struct MissionConfig {
  UtilityWeights weights;
  InspectionParams params;
  sim::Modality modality = sim::Modality::Aerial;
  sim::CameraModel camera;
  sim::NoiseSpec noise;
  SimilarityNorm similarity_norm = SimilarityNorm::Set;
  bool naive_edges = false;
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  double start_yaw = 0.0;
  /// Safety cap on explore-inspect iterations, as a multiple of world targets.
  int max_iterations_per_target = 4;
  /// Planner searches are repeated this many times for timing.
  int timing_repeats = 1;
};

nlohmann::ordered_json to_json(const MissionConfig& c);
/// Missing keys keep their defaults. Throws Error(InvalidConfig).
MissionConfig mission_config_from_json(const nlohmann::json& j);

}  // namespace xflie::flie
