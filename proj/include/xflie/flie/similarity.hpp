#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "xflie/flie/params.hpp"
#include "xflie/lsg/graph.hpp"

namespace xflie::flie {

/// Simulator stand-in for an image: the sorted keys of observed surface cells.
struct ObservationRecord {
  lsg::NodeId pose_node_id = 0;
  std::vector<std::uint64_t> cells;

  std::size_t keypoints() const { return cells.size(); }
};

/// M(candidate, query). Must be pure.
using Matcher = std::function<std::size_t(const ObservationRecord& candidate,
                                          const ObservationRecord& query)>;

/// Shared cells, capped at |K_q|.
std::size_t cell_intersection_matcher(const ObservationRecord& candidate,
                                      const ObservationRecord& query);

/// Gamma = sum of matches / |K_q|, or 0 when d_curr > d_thresh. With
/// SimilarityNorm::Set the sum is also divided by the number of candidates.
/// Throws Error(EmptyCandidateSet); std::invalid_argument when
/// |K_q| == 0.
double scene_similarity(const ObservationRecord& query,
                        std::span<const ObservationRecord> candidates, double d_curr,
                        double d_thresh, SimilarityNorm norm = SimilarityNorm::Set,
                        const Matcher& matcher = cell_intersection_matcher);

}  // namespace xflie::flie
