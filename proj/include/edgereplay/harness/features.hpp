#pragma once

#include "edgereplay/imaging/image.hpp"
#include "edgereplay/memory/herding.hpp"

namespace edgereplay::harness {

inline constexpr int kFeatureSide = 16;
inline constexpr int kFeatureDim = kFeatureSide * kFeatureSide * 3;

// Pixel-area resample to 16x16, standardise each channel to zero mean and unit
// variance (a constant channel becomes zeros), flatten as y, x, channel.
memory::FeatureVector featurize(const imaging::RgbImage& img);

}  // namespace edgereplay::harness
