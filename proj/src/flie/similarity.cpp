#include "xflie/flie/similarity.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>

#include "xflie/flie/errors.hpp"

namespace xflie::flie {

std::size_t cell_intersection_matcher(const ObservationRecord& candidate,
                                      const ObservationRecord& query) {
  std::size_t shared = 0;
  auto a = candidate.cells.begin();
  auto b = query.cells.begin();
  while (a != candidate.cells.end() && b != query.cells.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++shared;
      ++a;
      ++b;
    }
  }
  return std::min(shared, query.keypoints());
}

double scene_similarity(const ObservationRecord& query,
                        std::span<const ObservationRecord> candidates, double d_curr,
                        double d_thresh, SimilarityNorm norm, const Matcher& matcher) {
  if (candidates.empty()) throw Error(Errc::EmptyCandidateSet, "no candidate records");
  if (query.keypoints() == 0) throw std::invalid_argument("scene_similarity: query has no keypoints");
  if (d_curr > d_thresh) return 0.0;
  double matches = 0.0;
  for (const auto& c : candidates) matches += static_cast<double>(matcher(c, query));
  double gamma = matches / static_cast<double>(query.keypoints());
  if (norm == SimilarityNorm::Set) gamma /= static_cast<double>(candidates.size());
  return gamma;
}

}  // namespace xflie::flie
