#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace xflie::flie {

enum class Verdict { Pending, Accept, Reject };

/// Where a candidate sits relative to the camera frustum for one frame.
enum class FovZone { Outside, Margin, Inside };

/// Per-candidate window: accept after `window` consecutive frames with a
/// detection; a miss while clearly inside the FOV rejects; a miss outside the
/// FOV or near its edge restarts the window.
class ConsistencyWindow {
 public:
  explicit ConsistencyWindow(int window) : window_(window) {}

  Verdict push(FovZone zone, bool detected);
  Verdict verdict() const { return verdict_; }
  int count() const { return count_; }

 private:
  int window_;
  int count_ = 0;
  Verdict verdict_ = Verdict::Pending;
};

struct TrackObservation {
  std::string sem_class;
  Eigen::Vector3d estimate = Eigen::Vector3d::Zero();
  double confidence = 0.0;
  double seg_area = 0.0;
  std::string image_ref;
};

struct Track {
  ConsistencyWindow window;
  Eigen::Vector3d estimate = Eigen::Vector3d::Zero();
  std::string sem_class;
  /// Highest-confidence observation in the current window.
  std::optional<TrackObservation> best;
  bool registered = false;
};

/// Associates per-frame observations to tracks by class and distance gate.
class TrackSet {
 public:
  TrackSet(int window, double gate) : window_(window), gate_(gate) {}

  /// `zone_of` classifies an estimate against the current frame's FOV.
  /// Returns the tracks accepted in this frame (indices into tracks()).
  template <typename ZoneFn>
  std::vector<std::size_t> update(const std::vector<TrackObservation>& frame, ZoneFn zone_of);

  const std::vector<Track>& tracks() const { return tracks_; }
  void mark_registered(std::size_t i) { tracks_[i].registered = true; }

 private:
  int window_;
  double gate_;
  std::vector<Track> tracks_;
};

template <typename ZoneFn>
std::vector<std::size_t> TrackSet::update(const std::vector<TrackObservation>& frame,
                                          ZoneFn zone_of) {
  std::vector<char> hit(tracks_.size(), 0);
  std::vector<std::size_t> accepted;
  std::vector<std::optional<TrackObservation>> assigned(tracks_.size());
  for (const auto& obs : frame) {
    std::optional<std::size_t> best;
    double best_d = gate_;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
      if (hit[i] || tracks_[i].sem_class != obs.sem_class) continue;
      const double d = (tracks_[i].estimate - obs.estimate).norm();
      if (d <= best_d) {
        best_d = d;
        best = i;
      }
    }
    if (!best) {
      tracks_.push_back({ConsistencyWindow(window_), obs.estimate, obs.sem_class, std::nullopt, false});
      hit.push_back(0);
      assigned.emplace_back();
      best = tracks_.size() - 1;
    }
    hit[*best] = 1;
    assigned[*best] = obs;
  }
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    Track& t = tracks_[i];
    const Verdict before = t.window.verdict();
    if (before != Verdict::Pending) continue;
    const FovZone zone = zone_of(t.estimate);
    const Verdict v = t.window.push(zone, hit[i] != 0);
    if (t.window.count() == 0) t.best.reset();
    if (hit[i]) {
      const auto& obs = *assigned[i];
      t.estimate = obs.estimate;
      if (!t.best || obs.confidence > t.best->confidence) t.best = obs;
    }
    if (v == Verdict::Accept) accepted.push_back(i);
  }
  return accepted;
}

}  // namespace xflie::flie
