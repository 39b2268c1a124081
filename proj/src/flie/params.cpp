#include "xflie/flie/params.hpp"

#include "xflie/flie/errors.hpp"

namespace xflie::flie {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::DegenerateDistance: return "DegenerateDistance";
    case Errc::EmptyCandidateSet: return "EmptyCandidateSet";
    case Errc::TargetLost: return "TargetLost";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::MissionAborted: return "MissionAborted";
  }
  return "Unknown";
}

const char* to_string(SimilarityNorm n) { return n == SimilarityNorm::Set ? "set" : "none"; }

SimilarityNorm similarity_norm_from_string(const std::string& s) {
  if (s == "set") return SimilarityNorm::Set;
  if (s == "none") return SimilarityNorm::None;
  throw Error(Errc::InvalidConfig, "similarity norm must be 'set' or 'none', got '" + s + "'");
}

void UtilityWeights::validate() const {
  if (!(s_p > 0.0 && s_a > 0.0 && s_n > 0.0)) {
    throw Error(Errc::InvalidConfig, "utility weights must be positive");
  }
}

void InspectionParams::validate() const {
  const bool positive = standoff > 0.0 && lateral_step > 0.0 && level_increment > 0.0 &&
                        vertical_overlap > 0.0 && base_altitude >= 0.0 && horizon > 0 && match_cell > 0.0 && match_bearing_bin_deg >= 0.0 &&
                        travel_fraction > 0.0 && proximity_fraction > 0.0 &&
                        d_target_check > 0.0 && d_feature_check > 0.0 &&
                        consistency_window > 0 && sweep_step_deg > 0.0 && max_circuits > 0 &&
                        association_gate > 0.0 && fov_margin_deg >= 0.0 &&
                        local_explore_stations > 0 && step_len > 0.0;
  if (!positive) throw Error(Errc::InvalidConfig, "inspection parameters must be positive");
  if (!(gamma_star > 0.0 && gamma_star < 1.0)) {
    throw Error(Errc::InvalidConfig, "gamma_star must lie in (0, 1)");
  }
}

nlohmann::ordered_json to_json(const MissionConfig& c) {
  const auto& p = c.params;
  return {{"weights", {{"S_p", c.weights.s_p}, {"S_a", c.weights.s_a}, {"S_n", c.weights.s_n}}},
          {"inspection",
           {{"standoff", p.standoff},
            {"lateral_step", p.lateral_step},
            {"level_increment", p.level_increment},
            {"vertical_overlap", p.vertical_overlap},
            {"base_altitude", p.base_altitude},
            {"gamma_star", p.gamma_star},
            {"horizon", p.horizon},
            {"match_cell", p.match_cell},
            {"match_bearing_bin_deg", p.match_bearing_bin_deg},
            {"travel_fraction", p.travel_fraction},
            {"proximity_fraction", p.proximity_fraction},
            {"d_target_check", p.d_target_check},
            {"d_feature_check", p.d_feature_check},
            {"consistency_window", p.consistency_window},
            {"sweep_step_deg", p.sweep_step_deg},
            {"sweep_overlap_deg", p.sweep_overlap_deg},
            {"max_circuits", p.max_circuits},
            {"association_gate", p.association_gate},
            {"fov_margin_deg", p.fov_margin_deg},
            {"local_explore_stations", p.local_explore_stations},
            {"step_len", p.step_len}}},
          {"modality", sim::to_string(c.modality)},
          {"camera", sim::to_json(c.camera)},
          {"noise", sim::to_json(c.noise)},
          {"similarity_norm", to_string(c.similarity_norm)},
          {"naive_edges", c.naive_edges},
          {"start", {c.start.x(), c.start.y(), c.start.z()}},
          {"start_yaw", c.start_yaw},
          {"max_iterations_per_target", c.max_iterations_per_target},
          {"timing_repeats", c.timing_repeats}};
}

MissionConfig mission_config_from_json(const nlohmann::json& j) {
  MissionConfig c;
  try {
    if (j.contains("weights")) {
      const auto& w = j.at("weights");
      c.weights.s_p = w.value("S_p", c.weights.s_p);
      c.weights.s_a = w.value("S_a", c.weights.s_a);
      c.weights.s_n = w.value("S_n", c.weights.s_n);
    }
    if (j.contains("inspection")) {
      const auto& q = j.at("inspection");
      auto& p = c.params;
      p.standoff = q.value("standoff", p.standoff);
      p.lateral_step = q.value("lateral_step", p.lateral_step);
      p.level_increment = q.value("level_increment", p.level_increment);
      p.vertical_overlap = q.value("vertical_overlap", p.vertical_overlap);
      p.base_altitude = q.value("base_altitude", p.base_altitude);
      p.gamma_star = q.value("gamma_star", p.gamma_star);
      p.horizon = q.value("horizon", p.horizon);
      p.match_cell = q.value("match_cell", p.match_cell);
      p.match_bearing_bin_deg = q.value("match_bearing_bin_deg", p.match_bearing_bin_deg);
      p.travel_fraction = q.value("travel_fraction", p.travel_fraction);
      p.proximity_fraction = q.value("proximity_fraction", p.proximity_fraction);
      p.d_target_check = q.value("d_target_check", p.d_target_check);
      p.d_feature_check = q.value("d_feature_check", p.d_feature_check);
      p.consistency_window = q.value("consistency_window", p.consistency_window);
      p.sweep_step_deg = q.value("sweep_step_deg", p.sweep_step_deg);
      p.sweep_overlap_deg = q.value("sweep_overlap_deg", p.sweep_overlap_deg);
      p.max_circuits = q.value("max_circuits", p.max_circuits);
      p.association_gate = q.value("association_gate", p.association_gate);
      p.fov_margin_deg = q.value("fov_margin_deg", p.fov_margin_deg);
      p.local_explore_stations = q.value("local_explore_stations", p.local_explore_stations);
      p.step_len = q.value("step_len", p.step_len);
    }
    if (j.contains("modality")) c.modality = sim::modality_from_string(j.at("modality").get<std::string>());
    if (j.contains("camera")) c.camera = sim::camera_from_json(j.at("camera"));
    if (j.contains("noise")) c.noise = sim::noise_from_json(j.at("noise"));
    if (j.contains("similarity_norm")) {
      c.similarity_norm = similarity_norm_from_string(j.at("similarity_norm").get<std::string>());
    }
    c.naive_edges = j.value("naive_edges", c.naive_edges);
    if (j.contains("start")) {
      const auto& s = j.at("start");
      c.start = {s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()};
    }
    c.start_yaw = j.value("start_yaw", c.start_yaw);
    c.max_iterations_per_target = j.value("max_iterations_per_target", c.max_iterations_per_target);
    c.timing_repeats = j.value("timing_repeats", c.timing_repeats);
    if (c.timing_repeats < 1) throw Error(Errc::InvalidConfig, "timing_repeats must be at least 1");
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, e.what());
  } catch (const std::invalid_argument& e) {
    throw Error(Errc::InvalidConfig, e.what());
  }
  c.weights.validate();
  c.params.validate();
  return c;
}

}  // namespace xflie::flie
