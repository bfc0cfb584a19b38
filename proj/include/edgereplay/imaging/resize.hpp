#pragma once

#include "edgereplay/imaging/image.hpp"

namespace edgereplay::imaging {

enum class ResampleMethod { lanczos, area, bilinear };

// Separable resampling with pixel-centre alignment. Lanczos uses a = 3 and
// widens the kernel by the scale factor when shrinking. Area weights each
// source pixel by its overlap with the target pixel's footprint. Channels are
// processed independently; results are rounded and clamped to [0, 255].
RgbImage resize_rgb(const RgbImage& img, int height, int width, ResampleMethod method);

// Lanczos when the target has at least as many pixels as the source,
// pixel-area resampling otherwise.
ResampleMethod preferred_method(int src_h, int src_w, int dst_h, int dst_w);

// Target (i, j) copies source (floor((i + 0.5) h / H), floor((j + 0.5) w / W)).
BitEdgeMap resize_edges_nearest(const BitEdgeMap& edges, int height, int width);

}  // namespace edgereplay::imaging
