#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace edgereplay::memory {

using FeatureVector = std::vector<double>;

struct HerdingRank {
  int class_id = 0;
  std::vector<std::size_t> ordering;  // permutation of sample indices
};

// Copy scaled to unit L2 norm; zero vectors stay zero.
FeatureVector l2_normalized(const FeatureVector& v);

// Greedy herding over L2-normalised features: step k picks the remaining
// sample whose addition brings the running mean of picks closest to the class
// mean. Ties (distances within 1e-12) go to the lowest index. Throws ValidationError on an empty input
// or mismatched dimensions.
HerdingRank herding_order(std::span<const FeatureVector> features, int class_id = 0);

}  // namespace edgereplay::memory
