#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "xflie/lsg/graph.hpp"

namespace xflie::flie {

struct PFFeature {
  lsg::NodeId pose = 0;
  std::string sem_class;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double confidence = 0.0;
  double seg_area = 0.0;

  bool operator==(const PFFeature&) const = default;
};

/// Unoptimized pose/feature pairs of one level: every feature carries exactly
/// one observation edge to the pose it was seen from.
struct PFGraph {
  std::vector<lsg::NodeId> poses;
  std::vector<PFFeature> features;

  bool operator==(const PFGraph&) const = default;
};

/// Among same-class features within `d_check`, keeps the higher
/// (confidence, area) one. Poses left without features are dropped from the
/// pair graph. Idempotent.
PFGraph prune_pf_graph(const PFGraph& pf, double d_check = 1.5);

std::vector<std::string> check_pf_graph(const PFGraph& pf, double d_check = 1.5);

}  // namespace xflie::flie
