#include "edgereplay/imaging/canny.hpp"

#include <cmath>
#include <cstdlib>

#include "edgereplay/common/error.hpp"

namespace edgereplay::imaging {

namespace {

constexpr double kTan22_5 = 0.41421356237309503;
constexpr double kTan67_5 = 2.4142135623730949;

GradientAxis quantize(int gx, int gy) {
  const double ax = std::abs(gx);
  const double ay = std::abs(gy);
  if (ay <= kTan22_5 * ax) return GradientAxis::deg0;
  if (ay > kTan67_5 * ax) return GradientAxis::deg90;
  return (gx > 0) == (gy > 0) ? GradientAxis::deg45 : GradientAxis::deg135;
}

// Canny on an image of at least 5x5.
BitEdgeMap canny_full(const GrayImage& gray, const CannyParams& params) {
  auto blurred = gaussian_blur5(gray, params.sigma);
  auto grad = sobel_gradients(blurred);
  auto candidates = suppress_non_maxima(grad, params.low);
  return hysteresis(grad, candidates, params.high);
}

}  // namespace

std::array<int, 5> gaussian_taps(double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("Gaussian sigma must be positive");
  std::array<double, 5> w{};
  double total = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double d = i - 2;
    w[i] = std::exp(-d * d / (2.0 * sigma * sigma));
    total += w[i];
  }
  std::array<int, 5> taps{};
  int outer = 0;
  for (int i = 0; i < 5; ++i) {
    if (i == 2) continue;
    taps[i] = static_cast<int>(std::lround(w[i] / total * 256.0));
    outer += taps[i];
  }
  taps[2] = 256 - outer;
  return taps;
}

GrayImage gaussian_blur5(const GrayImage& img, double sigma) {
  const auto taps = gaussian_taps(sigma);
  const int h = img.height();
  const int w = img.width();
  // Horizontal pass keeps full precision; one rounding after the vertical pass.
  std::vector<std::int32_t> rows(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int32_t s = 0;
      for (int k = -2; k <= 2; ++k) s += taps[k + 2] * img.at(y, reflect101(x + k, w));
      rows[static_cast<std::size_t>(y) * w + x] = s;
    }
  }
  GrayImage out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int64_t s = 0;
      for (int k = -2; k <= 2; ++k) s += taps[k + 2] * rows[static_cast<std::size_t>(reflect101(y + k, h)) * w + x];
      out.at(y, x) = static_cast<std::uint8_t>((s + 32768) >> 16);
    }
  }
  return out;
}

GradientField sobel_gradients(const GrayImage& img) {
  const int h = img.height();
  const int w = img.width();
  GradientField g;
  g.height = h;
  g.width = w;
  g.magnitude.resize(static_cast<std::size_t>(h) * w);
  g.direction.resize(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    const int ym = reflect101(y - 1, h);
    const int yp = reflect101(y + 1, h);
    for (int x = 0; x < w; ++x) {
      const int xm = reflect101(x - 1, w);
      const int xp = reflect101(x + 1, w);
      const int gx = (img.at(ym, xp) + 2 * img.at(y, xp) + img.at(yp, xp)) -
                     (img.at(ym, xm) + 2 * img.at(y, xm) + img.at(yp, xm));
      const int gy = (img.at(yp, xm) + 2 * img.at(yp, x) + img.at(yp, xp)) -
                     (img.at(ym, xm) + 2 * img.at(ym, x) + img.at(ym, xp));
      const auto i = static_cast<std::size_t>(y) * w + x;
      g.magnitude[i] = std::sqrt(static_cast<double>(gx * gx + gy * gy));
      g.direction[i] = quantize(gx, gy);
    }
  }
  return g;
}

std::vector<std::uint8_t> suppress_non_maxima(const GradientField& grad, double low) {
  const int h = grad.height;
  const int w = grad.width;
  auto mag_or_zero = [&](int y, int x) {
    return (y < 0 || y >= h || x < 0 || x >= w) ? 0.0 : grad.mag(y, x);
  };
  std::vector<std::uint8_t> keep(static_cast<std::size_t>(h) * w, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto i = static_cast<std::size_t>(y) * w + x;
      const double m = grad.magnitude[i];
      if (!(m > low)) continue;
      // (dy, dx) of the neighbour on the "previous" side of the gradient line.
      int dy = 0, dx = 0;
      switch (grad.direction[i]) {
        case GradientAxis::deg0: dy = 0; dx = -1; break;
        case GradientAxis::deg45: dy = -1; dx = -1; break;
        case GradientAxis::deg90: dy = -1; dx = 0; break;
        case GradientAxis::deg135: dy = -1; dx = 1; break;
      }
      if (m > mag_or_zero(y + dy, x + dx) && m >= mag_or_zero(y - dy, x - dx)) keep[i] = 1;
    }
  }
  return keep;
}

BitEdgeMap hysteresis(const GradientField& grad, const std::vector<std::uint8_t>& candidates, double high) {
  const int h = grad.height;
  const int w = grad.width;
  BitEdgeMap out(h, w);
  std::vector<std::uint8_t> visited(candidates.size(), 0);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto i = static_cast<std::size_t>(y) * w + x;
      if (!candidates[i] || visited[i] || !(grad.magnitude[i] > high)) continue;
      visited[i] = 1;
      stack.emplace_back(y, x);
      while (!stack.empty()) {
        auto [cy, cx] = stack.back();
        stack.pop_back();
        out.set(cy, cx);
        for (int ny = cy - 1; ny <= cy + 1; ++ny) {
          for (int nx = cx - 1; nx <= cx + 1; ++nx) {
            if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
            const auto j = static_cast<std::size_t>(ny) * w + nx;
            if (candidates[j] && !visited[j]) {
              visited[j] = 1;
              stack.emplace_back(ny, nx);
            }
          }
        }
      }
    }
  }
  return out;
}

BitEdgeMap canny_edges(const GrayImage& gray, const CannyParams& params) {
  if (params.low < 0.0 || params.low > params.high) throw ValidationError("Canny thresholds need 0 <= low <= high");
  const int h = gray.height();
  const int w = gray.width();
  if (h >= 5 && w >= 5) return canny_full(gray, params);

  // Embed small inputs in a zero canvas large enough for the 5x5 kernel.
  GrayImage canvas(std::max(h, 5), std::max(w, 5), 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) canvas.at(y, x) = gray.at(y, x);
  auto full = canny_full(canvas, params);
  BitEdgeMap out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (full.get(y, x)) out.set(y, x);
  return out;
}

BitEdgeMap canny_edges(const RgbImage& img, const CannyParams& params) {
  return canny_edges(to_grayscale(img), params);
}

}  // namespace edgereplay::imaging
