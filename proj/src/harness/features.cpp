#include "edgereplay/harness/features.hpp"

#include <cmath>

#include "edgereplay/imaging/resize.hpp"

namespace edgereplay::harness {

memory::FeatureVector featurize(const imaging::RgbImage& img) {
  const auto small = (img.height() == kFeatureSide && img.width() == kFeatureSide)
                         ? img
                         : imaging::resize_rgb(img, kFeatureSide, kFeatureSide, imaging::ResampleMethod::area);
  constexpr int n = kFeatureSide * kFeatureSide;
  memory::FeatureVector out(kFeatureDim, 0.0);
  const auto px = small.pixels();
  for (int c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += px[static_cast<std::size_t>(i) * 3 + c];
    mean /= n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = px[static_cast<std::size_t>(i) * 3 + c] - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / n);
    if (sd < 1e-9) continue;
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i) * 3 + c] = (px[static_cast<std::size_t>(i) * 3 + c] - mean) / sd;
  }
  return out;
}

}  // namespace edgereplay::harness
