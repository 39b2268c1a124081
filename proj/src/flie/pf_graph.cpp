#include "xflie/flie/pf_graph.hpp"

#include <algorithm>
#include <numeric>

namespace xflie::flie {

PFGraph prune_pf_graph(const PFGraph& pf, double d_check) {
  std::vector<std::size_t> order(pf.features.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&pf](std::size_t a, std::size_t b) {
    const auto& fa = pf.features[a];
    const auto& fb = pf.features[b];
    if (fa.confidence != fb.confidence) return fa.confidence > fb.confidence;
    return fa.seg_area > fb.seg_area;
  });

  std::vector<char> keep(pf.features.size(), 0);
  std::vector<std::size_t> kept;
  for (const std::size_t i : order) {
    const auto& f = pf.features[i];
    const bool near_same = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
      const auto& o = pf.features[k];
      return o.sem_class == f.sem_class && (o.position - f.position).norm() <= d_check;
    });
    if (!near_same) {
      keep[i] = 1;
      kept.push_back(i);
    }
  }

  PFGraph out;
  for (std::size_t i = 0; i < pf.features.size(); ++i) {
    if (keep[i]) out.features.push_back(pf.features[i]);
  }
  for (const auto pose : pf.poses) {
    const bool used = std::any_of(out.features.begin(), out.features.end(),
                                  [pose](const PFFeature& f) { return f.pose == pose; });
    if (used) out.poses.push_back(pose);
  }
  return out;
}

std::vector<std::string> check_pf_graph(const PFGraph& pf, double d_check) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < pf.features.size(); ++i) {
    const auto& a = pf.features[i];
    if (std::count(pf.poses.begin(), pf.poses.end(), a.pose) != 1) {
      out.push_back("feature " + a.sem_class + " has no unique parent pose");
    }
    for (std::size_t j = i + 1; j < pf.features.size(); ++j) {
      const auto& b = pf.features[j];
      if (a.sem_class == b.sem_class && (a.position - b.position).norm() <= d_check) {
        out.push_back("two " + a.sem_class + " features within " + std::to_string(d_check) + " m");
      }
    }
  }
  return out;
}

}  // namespace xflie::flie
