#include "xflie/flie/selection.hpp"

#include <algorithm>
#include <cmath>

#include "xflie/flie/errors.hpp"

namespace xflie::flie {

double utility(const lsg::TargetNode& v, const lsg::LayeredSemanticGraph& g,
               const Eigen::Vector3d& robot_pos, const UtilityWeights& w, int image_w,
               int image_h) {
  const double dist = (robot_pos - v.position).norm();
  if (dist < 1e-6) throw Error(Errc::DegenerateDistance, v.label + " coincides with the robot");
  const double p = 1.0 / dist;
  const double a = v.seg_area / (static_cast<double>(image_w) * image_h);

  double sum = 0.0;
  std::size_t others = 0;
  for (const auto& o : g.targets()) {
    if (o.inspected() || o.id == v.id) continue;
    sum += (o.position - v.position).norm();
    ++others;
  }
  double n = 0.0;
  if (others > 0) {
    const double mean = sum / static_cast<double>(others);
    if (mean < 1e-12) throw Error(Errc::DegenerateDistance, v.label + " coincides with its neighbors");
    n = 1.0 / mean;
  }
  return w.s_p * p + w.s_a * a + w.s_n * n;
}

std::optional<lsg::NodeId> select_next_target(const lsg::LayeredSemanticGraph& g,
                                              const Eigen::Vector3d& robot_pos,
                                              const UtilityWeights& w, int image_w, int image_h) {
  std::optional<lsg::NodeId> best;
  double best_u = 0.0;
  for (const auto& t : g.targets()) {
    if (t.inspected()) continue;
    const double u = utility(t, g, robot_pos, w, image_w, image_h);
    if (!best || u > best_u || (u == best_u && t.id < *best)) {
      best = t.id;
      best_u = u;
    }
  }
  return best;
}

bool keep_before(const lsg::TargetNode& a, const lsg::TargetNode& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.seg_area != b.seg_area) return a.seg_area > b.seg_area;
  return a.id < b.id;
}

std::vector<lsg::NodeId> optimize_target_graph(lsg::LayeredSemanticGraph& g,
                                               const InspectionParams& params) {
  std::vector<const lsg::TargetNode*> detected;
  for (const auto& t : g.targets()) {
    if (!t.inspected()) detected.push_back(&t);
  }
  std::sort(detected.begin(), detected.end(),
            [](const auto* a, const auto* b) { return keep_before(*a, *b); });

  std::vector<lsg::NodeId> removed;
  std::vector<const lsg::TargetNode*> kept;
  for (const auto* t : detected) {
    bool inside = false;
    for (const auto& i : g.targets()) {
      if (i.inspected() && i.polygon->contains(t->position.head<2>())) {
        inside = true;
        break;
      }
    }
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const auto* k) {
      return (k->position - t->position).norm() <= params.d_target_check;
    });
    if (inside || duplicate) {
      removed.push_back(t->id);
    } else {
      kept.push_back(t);
    }
  }
  for (const auto id : removed) g.remove_target(id);
  return removed;
}

std::vector<std::string> check_target_graph(const lsg::LayeredSemanticGraph& g,
                                            const InspectionParams& params) {
  std::vector<std::string> out;
  const auto& ts = g.targets();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i].inspected()) continue;
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      if (ts[j].inspected()) continue;
      const double d = (ts[i].position - ts[j].position).norm();
      if (d <= params.d_target_check) {
        out.push_back(ts[i].label + " and " + ts[j].label + " are " + std::to_string(d) + " m apart");
      }
    }
    for (const auto& o : ts) {
      if (o.inspected() && o.polygon->contains(ts[i].position.head<2>())) {
        out.push_back(ts[i].label + " lies inside the polygon of " + o.label);
      }
    }
  }
  return out;
}

}  // namespace xflie::flie
