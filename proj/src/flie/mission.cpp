#include "xflie/flie/mission.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "xflie/flie/consistency.hpp"
#include "xflie/flie/errors.hpp"
#include "xflie/flie/pf_graph.hpp"
#include "xflie/flie/selection.hpp"
#include "xflie/hpp/errors.hpp"
#include "xflie/sim/errors.hpp"
#include "xflie/sim/motion.hpp"
#include "xflie/sim/sensing.hpp"

namespace xflie::flie {

namespace {

using Json = nlohmann::ordered_json;
using lsg::NodeId;

constexpr double kSpeed = 1.0;
constexpr double kFrameTime = 0.1;

double deg(double d) { return d * std::numbers::pi / 180.0; }

Json vec(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector2d closest_on_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                                   const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return a + t * ab;
}

Eigen::Vector2d closest_on_ring(const std::vector<Eigen::Vector2d>& ring, const Eigen::Vector2d& p) {
  Eigen::Vector2d best = ring.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const Eigen::Vector2d q = closest_on_segment(p, ring[i], ring[(i + 1) % ring.size()]);
    const double d = (q - p).norm();
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

std::string image_ref(std::size_t frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img-%06zu", frame);
  return buf;
}

}  // namespace

const char* to_string(Policy p) {
  switch (p) {
    case Policy::Idle: return "idle";
    case Policy::Survey360: return "expl:360";
    case Policy::Inspect: return "insp";
    case Policy::LocalExplore: return "expl:LE";
    case Policy::Transit: return "transit";
    case Policy::Query: return "query";
  }
  return "?";
}

std::vector<ViewPose> plan_view_poses(const lsg::ConvexPolygon2D& footprint, double standoff,
                                      double lateral_step, const Eigen::Vector2d& near) {
  const std::vector<Eigen::Vector2d> contour = sim::offset_contour(footprint, standoff);
  const std::size_t m = contour.size();
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + (contour[(i + 1) % m] - contour[i]).norm();
  const double length = cum[m];

  // Arc position of the contour point closest to `near`.
  double s0 = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d a = contour[i];
    const Eigen::Vector2d b = contour[(i + 1) % m];
    const Eigen::Vector2d q = closest_on_segment(near, a, b);
    const double d = (q - near).norm();
    if (d < best) {
      best = d;
      s0 = cum[i] + (q - a).norm();
    }
  }

  auto point_at = [&](double s) {
    s = std::fmod(s, length);
    if (s < 0.0) s += length;
    const auto it = std::upper_bound(cum.begin(), cum.end(), s);
    const std::size_t i = std::min<std::size_t>(m - 1, static_cast<std::size_t>(it - cum.begin()) - 1);
    const double seg = cum[i + 1] - cum[i];
    const double t = seg > 0.0 ? (s - cum[i]) / seg : 0.0;
    return Eigen::Vector2d(contour[i] + t * (contour[(i + 1) % m] - contour[i]));
  };

  const auto n = static_cast<std::size_t>(std::ceil(length / lateral_step - 1e-9));
  std::vector<ViewPose> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    ViewPose vp;
    vp.xy = point_at(s0 + length * static_cast<double>(i) / static_cast<double>(n));
    const Eigen::Vector2d q = closest_on_ring(footprint.vertices(), vp.xy);
    vp.yaw = std::atan2(q.y() - vp.xy.y(), q.x() - vp.xy.x());
    out.push_back(vp);
  }
  out.push_back(out.front());
  return out;
}

bool needs_next_level(double height, std::uint32_t k, const InspectionParams& params,
                      sim::Modality modality) {
  if (modality != sim::Modality::Aerial) return false;
  return height > (k + 1) * params.level_increment + params.vertical_overlap;
}

Mission::Mission(sim::WorldSpec world, MissionConfig config, MissionObserver* observer)
    : world_(std::move(world)), config_(std::move(config)), observer_(observer) {
  config_.weights.validate();
  config_.params.validate();
  config_.camera.validate();
  world_.validate();
  Eigen::Vector3d start = config_.start;
  if (config_.modality == sim::Modality::Ground) start.z() = world_.ground_z;
  state_.robot = sim::RobotState::at(start, config_.start_yaw, config_.modality);
  if (!world_.bounds.contains(start)) throw sim::Error(sim::Errc::OutOfBounds, "start outside bounds");
  graph_.refresh_root(state_.robot.pose);
}

void Mission::place_robot(const sim::RobotState& robot) {
  state_.robot = robot;
  graph_.refresh_root(robot.pose);
}

void Mission::log(const std::string& event, Json fields) {
  Json e;
  e["seq"] = events_.size();
  e["t"] = state_.time;
  e["event"] = event;
  e["policy"] = to_string(state_.policy);
  for (auto& [k, v] : fields.items()) e[k] = std::move(v);
  events_.push_back(std::move(e));
}

void Mission::move_to(const lsg::Pose6& target) {
  const auto step = sim::step_to(state_.robot, target, world_, config_.params.step_len);
  state_.robot = step.state;
  state_.time += step.distance / kSpeed;
  if (observer_ != nullptr && !step.trace.empty()) observer_->on_move(step.trace);
}

void Mission::move_to(const Eigen::Vector3d& position) {
  lsg::Pose6 p = state_.robot.pose;
  p.position = position;
  move_to(p);
}

void Mission::frame() {
  ++state_.frames;
  state_.time += kFrameTime;
  frame_poses_.push_back(state_.robot.pose);
  if (observer_ != nullptr) observer_->on_frame(state_.robot);
}

const lsg::Pose6& Mission::localization_pose() const {
  const auto k = static_cast<std::size_t>(std::max(0, config_.noise.desync_frames));
  const std::size_t n = frame_poses_.size();
  return frame_poses_[n - 1 - std::min(k, n - 1)];
}

void Mission::check_target_graph_now() {
  ++stats_.target_graph_checks;
  for (const auto& v : check_target_graph(graph_, config_.params)) {
    ++stats_.invariant_violations;
    log("invariant_violation", {{"what", v}});
  }
}

std::vector<NodeId> Mission::optimize() {
  const auto removed = optimize_target_graph(graph_, config_.params);
  if (!removed.empty()) log("optimize", {{"removed", removed}});
  check_target_graph_now();
  return removed;
}

std::vector<NodeId> Mission::sweep(bool validate_polygons) {
  const auto& p = config_.params;
  const auto& cam = config_.camera;
  const double half = 0.5 * cam.hfov();
  const double margin = deg(p.fov_margin_deg);
  const int frames = static_cast<int>(std::lround((360.0 + p.sweep_overlap_deg) / p.sweep_step_deg)) + 1;
  const double yaw0 = state_.robot.yaw();
  TrackSet tracks(p.consistency_window, p.association_gate);
  std::vector<NodeId> registered;

  for (int f = 0; f < frames; ++f) {
    state_.robot.pose.orientation = sim::yaw_quaternion(yaw0 + deg(p.sweep_step_deg) * f);
    frame();
    const auto dets = sim::sense(world_, state_.robot, cam, sim::SenseMode::Exploration, config_.noise);
    const sim::RobotState loc{localization_pose(), state_.robot.modality};
    std::vector<TrackObservation> obs;
    for (const auto& d : dets) {
      try {
        const Eigen::Vector3d est =
            sim::localize_semantic(d, sim::SensorMode::LidarProjection, world_, loc, cam, config_.noise);
        obs.push_back({d.sem_class, est, d.confidence, d.seg_area, image_ref(state_.frames)});
      } catch (const sim::Error&) {
        // Mask without supporting points: the detection is discarded.
      }
    }
    const auto zone_of = [&](const Eigen::Vector3d& est) {
      const double dist = (est - sim::camera_center(cam, state_.robot.pose)).norm();
      const double off = sim::horizontal_offset(est, cam, state_.robot.pose);
      if (dist > cam.d_max || off > half) return FovZone::Outside;
      if (off > half - margin) return FovZone::Margin;
      return FovZone::Inside;
    };
    for (const std::size_t i : tracks.update(obs, zone_of)) {
      const TrackObservation& best = *tracks.tracks()[i].best;
      tracks.mark_registered(i);
      if (validate_polygons) {
        const lsg::TargetNode* owner = nullptr;
        for (const auto& t : graph_.targets()) {
          if (t.inspected() && t.polygon->contains(best.estimate.head<2>())) {
            owner = &t;
            break;
          }
        }
        if (owner != nullptr) {
          log("reject_in_polygon", {{"class", best.sem_class}, {"estimate", vec(best.estimate)},
                                    {"polygon_of", owner->id}});
          continue;
        }
      }
      const NodeId id = graph_.register_target(
          {best.estimate, best.sem_class, best.confidence, best.seg_area, best.image_ref},
          state_.robot.pose.position);
      registered.push_back(id);
      log("register", {{"id", id}, {"label", graph_.target(id).label},
                       {"estimate", vec(best.estimate)}, {"confidence", best.confidence},
                       {"seg_area", best.seg_area}});
    }
  }
  return registered;
}

std::vector<NodeId> Mission::survey_360() {
  state_.policy = Policy::Survey360;
  log("survey_begin", {{"position", vec(state_.robot.pose.position)}});
  auto ids = sweep(false);
  optimize();
  return ids;
}

std::optional<int> Mission::match_object(const Eigen::Vector3d& estimate) const {
  std::optional<int> best;
  double best_d = config_.params.association_gate;
  for (std::size_t i = 0; i < world_.targets.size(); ++i) {
    const auto& fp = world_.targets[i].footprint;
    const Eigen::Vector2d p = estimate.head<2>();
    const double d = fp.contains(p) ? 0.0 : (closest_on_ring(fp.vertices(), p) - p).norm();
    if (d <= best_d) {
      if (!best || d < best_d) best = static_cast<int>(i);
      best_d = d;
    }
  }
  return best;
}

void Mission::inspect(NodeId id) {
  const auto& p = config_.params;
  const auto& cam = config_.camera;
  state_.policy = Policy::Inspect;
  state_.current_target = id;
  const lsg::TargetNode& node = graph_.target(id);
  if (node.inspected()) throw lsg::Error(lsg::Errc::AlreadyInspected, node.label);
  const std::string label = node.label;

  const auto gt = match_object(node.position);
  if (!gt) throw Error(Errc::TargetLost, label + ": no object near the estimate");
  for (const auto& [other, obj] : gt_of_node_) {
    if (obj == *gt) {
      throw Error(Errc::TargetLost, label + ": object already inspected as " + graph_.target(other).label);
    }
  }
  const sim::GroundTruthTarget& object = world_.targets[*gt];
  log("inspect_begin", {{"id", id}, {"label", label}});

  const auto views = plan_view_poses(object.footprint, p.standoff, p.lateral_step,
                                     state_.robot.pose.position.head<2>());
  const int n = static_cast<int>(views.size()) - 1;
  const double orbit = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (views[i + 1].xy - views[i].xy).norm();
    return s;
  }();

  lsg::LevelGraph levels;
  std::vector<PFGraph> pf;
  for (std::uint32_t k = 0;; ++k) {
    const double z = config_.modality == sim::Modality::Aerial
                         ? world_.ground_z + p.base_altitude + k * p.level_increment
                         : world_.ground_z;
    pf.emplace_back();
    std::vector<ObservationRecord> records;
    lsg::LevelNode* level = nullptr;
    double traveled = 0.0;
    LevelSummary summary{id, k, n, 0, false};

    for (int i = 0;; ++i) {
      const ViewPose& vp = views[static_cast<std::size_t>(i % n)];
      lsg::Pose6 pose;
      pose.position = {vp.xy.x(), vp.xy.y(), z};
      pose.orientation = sim::yaw_quaternion(vp.yaw);
      const Eigen::Vector3d before = state_.robot.pose.position;
      move_to(pose);
      if (i > 0) traveled += (pose.position - before).norm();
      frame();

      if (level == nullptr) {
        level = &levels.add_level(graph_.allocate_id(), pose.position);
        state_.current_level = level->id;
        log("level_begin", {{"target", id}, {"level", level->id}, {"index", k}});
      }
      lsg::PoseNode pn;
      pn.id = graph_.allocate_id();
      pn.label = "Pose-" + std::to_string(level->poses.nodes.size());
      pn.pose = pose;
      pn.image_ref = image_ref(state_.frames);
      level->append_pose(std::move(pn));
      const NodeId pose_id = level->poses.nodes.back().id;
      state_.current_pose = pose_id;

      const sim::RobotState loc{localization_pose(), state_.robot.modality};
      bool any = false;
      for (const auto& d : sim::sense(world_, state_.robot, cam, sim::SenseMode::Inspection,
                                      config_.noise, *gt)) {
        try {
          const Eigen::Vector3d est =
              sim::localize_semantic(d, sim::SensorMode::AlignedDepth, world_, loc, cam, config_.noise);
          pf.back().features.push_back({pose_id, d.sem_class, est, d.confidence, d.seg_area});
          any = true;
        } catch (const sim::Error&) {
        }
      }
      if (any) pf.back().poses.push_back(pose_id);

      records.push_back({pose_id, sim::observe_surface_cells(world_, *gt, state_.robot, cam, p.match_cell,
                                                             p.match_bearing_bin_deg)});
      bool done = false;
      if (traveled >= p.travel_fraction * orbit && records.back().keypoints() > 0) {
        const std::size_t horizon = std::min<std::size_t>(p.horizon, records.size());
        const double d_curr = (state_.robot.pose.position - level->position).norm();
        const double d_thresh = p.proximity_fraction * orbit;
        const double gamma = scene_similarity(records.back(),
                                              std::span(records.data(), horizon), d_curr,
                                              d_thresh, config_.similarity_norm);
        ++stats_.gamma_evaluations;
        if (config_.similarity_norm == SimilarityNorm::Set && !(gamma >= 0.0 && gamma <= 1.0)) {
          ++stats_.gamma_out_of_range;
        }
        if (d_curr > d_thresh && gamma != 0.0) ++stats_.gamma_gate_violations;
        log("gamma", {{"target", id}, {"level", k}, {"pose_index", i}, {"gamma", gamma},
                      {"d_curr", d_curr}, {"d_thresh", d_thresh}});
        done = gamma >= p.gamma_star;
      }
      if (!done && i >= p.max_circuits * n) {
        summary.failsafe = true;
        done = true;
      }
      if (done) {
        summary.closing_index = i;
        break;
      }
    }
    stats_.levels.push_back(summary);
    log("level_complete", {{"target", id}, {"level", k}, {"closing_index", summary.closing_index},
                           {"circuit_poses", n}, {"failsafe", summary.failsafe}});
    if (!needs_next_level(object.height, k, p, config_.modality)) break;
  }

  // Prune the pose/feature pairs and nest the survivors under their poses.
  for (std::size_t k = 0; k < levels.nodes.size(); ++k) {
    const PFGraph pruned = prune_pf_graph(pf[k], p.d_feature_check);
    ++stats_.pf_graph_checks;
    for (const auto& v : check_pf_graph(pruned, p.d_feature_check)) {
      ++stats_.invariant_violations;
      log("invariant_violation", {{"what", v}});
    }
    std::map<std::string, int> ordinal;
    auto& poses = levels.nodes[k].poses.nodes;
    for (auto& pose : poses) {
      for (const auto& f : pruned.features) {
        if (f.pose != pose.id) continue;
        lsg::FeatureNode fn;
        fn.id = graph_.allocate_id();
        fn.label = lsg::ordinal_label(f.sem_class, static_cast<std::uint64_t>(++ordinal[f.sem_class]));
        fn.position = f.position;
        fn.sem_class = f.sem_class;
        fn.confidence = f.confidence;
        fn.seg_area = f.seg_area;
        pose.features.nodes.push_back(std::move(fn));
      }
    }
    log("features", {{"target", id}, {"level", k}, {"observed", pf[k].features.size()},
                     {"kept", pruned.features.size()}});
  }

  std::vector<Eigen::Vector2d> ring;
  for (const auto& pose : levels.nodes.front().poses.nodes) ring.push_back(pose.pose.position.head<2>());
  const lsg::ConvexPolygon2D polygon = lsg::ConvexPolygon2D::hull_of(ring);
  graph_.mark_inspected(id, polygon.vertices(), std::move(levels));
  gt_of_node_[id] = *gt;
  log("inspect_done", {{"id", id}, {"label", label},
                       {"position", vec(graph_.target(id).position)},
                       {"levels", graph_.target(id).levels->nodes.size()}});
  add_inspected_edges(id, *gt);
}

void Mission::add_inspected_edges(NodeId id, int gt) {
  const auto& a = graph_.target(id);
  for (const auto& [other, obj] : gt_of_node_) {
    if (other == id) continue;
    const auto& b = graph_.target(other);
    const double d = (a.position - b.position).norm();
    const bool in_range = d <= config_.camera.d_max;
    // Local-explore sweeps cover every bearing, so the FOV condition reduces to
    // the line of sight being clear of third-party footprints.
    const bool clear = !sim::segment_occluded(world_, a.position, b.position, gt, obj);
    const bool eligible = in_range && clear;
    log("edge_check", {{"a", id}, {"b", other}, {"distance", d}, {"in_range", in_range},
                       {"line_of_sight", clear}, {"eligible", eligible}});
    if (eligible) graph_.add_inspected_edge(id, other);
  }
}

std::vector<NodeId> Mission::local_explore(NodeId inspected) {
  state_.policy = Policy::LocalExplore;
  const auto& t = graph_.target(inspected);
  const auto& ring = t.levels->nodes.front().poses.nodes;
  const std::size_t n = ring.size() > 1 ? ring.size() - 1 : ring.size();

  // Drop to the Level-0 pose nearest the robot, then walk the chain.
  std::size_t at = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (ring[i].pose.position - state_.robot.pose.position).norm();
    if (d < best) {
      best = d;
      at = i;
    }
  }
  move_to(ring[at].pose);
  log("local_explore_begin", {{"id", inspected}});

  const int stations = config_.params.local_explore_stations;
  std::vector<NodeId> registered;
  for (int s = 0; s < stations; ++s) {
    const std::size_t target_index = (at + static_cast<std::size_t>(s) * n / stations) % n;
    while (at != target_index) {
      at = (at + 1) % n;
      move_to(graph_.target(inspected).levels->nodes.front().poses.nodes[at].pose);
    }
    auto ids = sweep(true);
    registered.insert(registered.end(), ids.begin(), ids.end());
  }
  optimize();
  std::erase_if(registered, [this](NodeId i) { return graph_.find_target(i) == nullptr; });
  return registered;
}

std::optional<NodeId> Mission::select() {
  graph_.refresh_root(state_.robot.pose);
  const auto& cam = config_.camera;
  std::vector<std::pair<NodeId, double>> utilities;
  for (const auto& t : graph_.targets()) {
    if (!t.inspected()) {
      utilities.emplace_back(t.id, utility(t, graph_, state_.robot.pose.position, config_.weights,
                                           cam.width, cam.height));
    }
  }
  for (const auto& [id, u] : utilities) graph_.set_utility(id, u);
  return select_next_target(graph_, state_.robot.pose.position, config_.weights, cam.width, cam.height);
}

void Mission::follow(const hpp::PlanResult& plan) {
  if ((plan.start - state_.robot.pose.position).norm() > 1e-9) move_to(plan.start);
  for (const auto& seg : plan.segments) {
    if (!seg.searched) {
      move_to(seg.end);
      continue;
    }
    for (std::size_t i = 1; i < seg.path.size(); ++i) {
      const lsg::NodeRef ref = graph_.locate(seg.path[i]);
      if (ref.layer == lsg::Layer::Pose) {
        move_to(ref.pose->pose);
      } else if (ref.layer == lsg::Layer::Level) {
        move_to(ref.level->position);
      }
    }
  }
  const lsg::NodeRef term = graph_.locate(plan.terminal_pose);
  move_to(term.pose->pose);
  state_.current_target = term.target->id;
  state_.current_level = term.level->id;
  state_.current_pose = term.pose->id;
}

void Mission::travel_to(NodeId target) {
  state_.policy = Policy::Transit;
  graph_.refresh_root(state_.robot.pose);
  const Eigen::Vector3d from = state_.robot.pose.position;
  const std::string qid = "mission-" + std::to_string(plans_.size());
  try {
    hpp::PlanResult r = hpp::plan(graph_, from, hpp::InspectTarget{target}, {config_.naive_edges, config_.timing_repeats});
    plans_.push_back({qid, "inspect " + graph_.target(target).label, from, r.terminal, r});
    if (observer_ != nullptr) observer_->on_plan(qid, from, r.terminal, r);
    log("plan", {{"query_id", qid}, {"target", target}, {"route", r.global_route},
                 {"segments", r.segments.size()}, {"length", r.total_length}});
    follow(r);
  } catch (const hpp::Error& e) {
    log("plan_direct", {{"target", target}, {"reason", e.what()}});
  }
}

void Mission::run() {
  log("mission_start", {{"start", vec(state_.robot.pose.position)}, {"targets_in_world", world_.targets.size()}});
  survey_360();
  const std::size_t cap =
      static_cast<std::size_t>(config_.max_iterations_per_target) * std::max<std::size_t>(1, world_.targets.size()) + 4;
  std::size_t it = 0;
  for (;; ++it) {
    if (it >= cap) throw Error(Errc::MissionAborted, "iteration cap reached");
    const auto next = select();
    if (!next) break;
    log("select", {{"id", *next}, {"label", graph_.target(*next).label},
                   {"utility", graph_.target(*next).utility}});
    travel_to(*next);
    try {
      inspect(*next);
    } catch (const Error& e) {
      if (e.code() != Errc::TargetLost) throw;
      log("target_lost", {{"id", *next}, {"reason", e.what()}});
      graph_.remove_target(*next);
      continue;
    }
    local_explore(*next);
  }
  state_.policy = Policy::Idle;
  std::size_t inspected = 0;
  for (const auto& t : graph_.targets()) inspected += t.inspected() ? 1 : 0;
  log("mission_end", {{"inspected", inspected}, {"detected", graph_.targets().size() - inspected},
                      {"nodes", graph_.node_count()}, {"edges", graph_.edge_count()},
                      {"iterations", it}});
}

const PlanRecord& Mission::execute_query(const std::string& text, const std::string& query_id) {
  state_.policy = Policy::Query;
  graph_.refresh_root(state_.robot.pose);
  const Eigen::Vector3d from = state_.robot.pose.position;
  const hpp::Query q = hpp::parse_query(text);
  hpp::PlanResult r = hpp::plan(graph_, from, q, {config_.naive_edges, config_.timing_repeats});
  plans_.push_back({query_id, text, from, r.terminal, r});
  if (observer_ != nullptr) observer_->on_plan(query_id, from, r.terminal, r);
  log("query", {{"query_id", query_id}, {"text", text}, {"route", r.global_route},
                {"segments", r.segments.size()}, {"length", r.total_length},
                {"terminal_pose", r.terminal_pose}});
  follow(r);
  return plans_.back();
}

}  // namespace xflie::flie
