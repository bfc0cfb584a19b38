#include "edgereplay/memory/herding.hpp"

#include <cmath>
#include <limits>

#include "edgereplay/common/error.hpp"

namespace edgereplay::memory {

namespace {

constexpr double kTieTolerance = 1e-12;

}  // namespace

FeatureVector l2_normalized(const FeatureVector& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  FeatureVector out(v.size(), 0.0);
  if (sq == 0.0) return out;
  const double norm = std::sqrt(sq);
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / norm;
  return out;
}

HerdingRank herding_order(std::span<const FeatureVector> features, int class_id) {
  if (features.empty()) throw ValidationError("herding needs at least one feature vector");
  const std::size_t dim = features.front().size();
  std::vector<FeatureVector> phi;
  phi.reserve(features.size());
  for (const auto& f : features) {
    if (f.size() != dim) throw ValidationError("herding: feature dimension mismatch");
    for (double x : f)
      if (!std::isfinite(x)) throw ValidationError("herding: non-finite feature");
    phi.push_back(l2_normalized(f));
  }

  const std::size_t n = phi.size();
  FeatureVector mu(dim, 0.0);
  for (const auto& p : phi)
    for (std::size_t d = 0; d < dim; ++d) mu[d] += p[d];
  for (auto& m : mu) m /= static_cast<double>(n);

  HerdingRank rank;
  rank.class_id = class_id;
  rank.ordering.reserve(n);
  std::vector<bool> taken(n, false);
  FeatureVector picked_sum(dim, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    std::size_t best = n;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      double dist = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = mu[d] - (phi[i][d] + picked_sum[d]) / static_cast<double>(k);
        dist += diff * diff;
      }
      // Distances within kTieTolerance count as equal so rounding noise cannot
      // override the lowest-index rule (exact ties are common in low dimension).
      if (dist < best_dist - kTieTolerance) {
        best_dist = dist;
        best = i;
      }
    }
    taken[best] = true;
    rank.ordering.push_back(best);
    for (std::size_t d = 0; d < dim; ++d) picked_sum[d] += phi[best][d];
  }
  return rank;
}

}  // namespace edgereplay::memory
