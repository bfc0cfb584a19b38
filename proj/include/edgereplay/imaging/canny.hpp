#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "edgereplay/imaging/image.hpp"

namespace edgereplay::imaging {

struct CannyParams {
  double low = 100.0;   // weak threshold on L2 gradient magnitude
  double high = 200.0;  // strong threshold
  double sigma = 1.4;   // 5x5 Gaussian
};

// Gradient direction quantized to the axis the gradient points along.
enum class GradientAxis : std::uint8_t { deg0 = 0, deg45 = 1, deg90 = 2, deg135 = 3 };

struct GradientField {
  int height = 0;
  int width = 0;
  std::vector<double> magnitude;
  std::vector<GradientAxis> direction;

  double mag(int y, int x) const { return magnitude[static_cast<std::size_t>(y) * width + x]; }
};

// Integer 5-tap Gaussian weights summing to 256. The 2-D blur is their outer
// product, so one rounding step of (sum + 2^15) >> 16 gives the blurred value.
std::array<int, 5> gaussian_taps(double sigma);

// Reflect-101 index into [0, n) (n >= 3 for offsets up to 2).
inline int reflect101(int i, int n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

GrayImage gaussian_blur5(const GrayImage& img, double sigma = 1.4);

// 3x3 Sobel with reflect-101 borders, L2 magnitude, 4-way direction.
GradientField sobel_gradients(const GrayImage& img);

// Pixels that are local maxima across their gradient direction and exceed
// `low`. Neighbours outside the image count as zero magnitude.
std::vector<std::uint8_t> suppress_non_maxima(const GradientField& grad, double low);

// 8-connected flood from pixels above `high` through the surviving candidates.
BitEdgeMap hysteresis(const GradientField& grad, const std::vector<std::uint8_t>& candidates, double high);

BitEdgeMap canny_edges(const GrayImage& gray, const CannyParams& params = {});
BitEdgeMap canny_edges(const RgbImage& img, const CannyParams& params = {});

}  // namespace edgereplay::imaging
