#include "edgereplay/imaging/resize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "edgereplay/common/error.hpp"

namespace edgereplay::imaging {

namespace {

// Contribution of source samples to one output sample along one axis.
struct Taps {
  int first = 0;
  std::vector<double> weights;
};

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double lanczos3(double x) {
  if (std::abs(x) >= 3.0) return 0.0;
  return sinc(x) * sinc(x / 3.0);
}

// Source samples clamp at the borders: weights landing outside [0, n) are
// folded onto the nearest edge sample.
Taps fold(int first, std::vector<double> raw, int n) {
  Taps t;
  const int last = first + static_cast<int>(raw.size()) - 1;
  t.first = std::clamp(first, 0, n - 1);
  const int end = std::clamp(last, 0, n - 1);
  t.weights.assign(static_cast<std::size_t>(end - t.first + 1), 0.0);
  for (std::size_t k = 0; k < raw.size(); ++k) {
    const int src = std::clamp(first + static_cast<int>(k), 0, n - 1);
    t.weights[static_cast<std::size_t>(src - t.first)] += raw[k];
  }
  return t;
}

std::vector<Taps> lanczos_taps(int src, int dst) {
  const double scale = static_cast<double>(src) / dst;
  const double stretch = std::max(scale, 1.0);
  const double support = 3.0 * stretch;
  std::vector<Taps> out(static_cast<std::size_t>(dst));
  for (int i = 0; i < dst; ++i) {
    const double centre = (i + 0.5) * scale - 0.5;
    const int lo = static_cast<int>(std::floor(centre - support)) + 1;
    const int hi = static_cast<int>(std::ceil(centre + support)) - 1;
    std::vector<double> raw;
    double total = 0.0;
    for (int s = lo; s <= hi; ++s) {
      raw.push_back(lanczos3((s - centre) / stretch));
      total += raw.back();
    }
    for (auto& v : raw) v /= total;
    out[static_cast<std::size_t>(i)] = fold(lo, std::move(raw), src);
  }
  return out;
}

std::vector<Taps> bilinear_taps(int src, int dst) {
  const double scale = static_cast<double>(src) / dst;
  std::vector<Taps> out(static_cast<std::size_t>(dst));
  for (int i = 0; i < dst; ++i) {
    const double centre = (i + 0.5) * scale - 0.5;
    const int lo = static_cast<int>(std::floor(centre));
    const double frac = centre - lo;
    out[static_cast<std::size_t>(i)] = fold(lo, {1.0 - frac, frac}, src);
  }
  return out;
}

std::vector<Taps> area_taps(int src, int dst) {
  const double scale = static_cast<double>(src) / dst;
  std::vector<Taps> out(static_cast<std::size_t>(dst));
  for (int i = 0; i < dst; ++i) {
    // Footprint [i * scale, (i + 1) * scale) in source coordinates, computed
    // from integers so that integral boundaries stay exact.
    const double begin = static_cast<double>(i) * src / dst;
    const double end = static_cast<double>(i + 1) * src / dst;
    const int lo = static_cast<int>(std::floor(begin));
    const int hi = std::min(static_cast<int>(std::ceil(end)) - 1, src - 1);
    std::vector<double> raw;
    for (int s = lo; s <= hi; ++s) {
      const double overlap = std::min(end, s + 1.0) - std::max(begin, static_cast<double>(s));
      raw.push_back(overlap / scale);
    }
    out[static_cast<std::size_t>(i)] = fold(lo, std::move(raw), src);
  }
  return out;
}

std::vector<Taps> taps_for(ResampleMethod method, int src, int dst) {
  switch (method) {
    case ResampleMethod::lanczos: return lanczos_taps(src, dst);
    case ResampleMethod::area: return area_taps(src, dst);
    case ResampleMethod::bilinear: return bilinear_taps(src, dst);
  }
  return {};
}

std::uint8_t to_u8(double v) {
  const double r = std::round(v);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

}  // namespace

RgbImage resize_rgb(const RgbImage& img, int height, int width, ResampleMethod method) {
  if (height < 1 || width < 1) throw ValidationError("resize target must be at least 1x1");
  const int sh = img.height();
  const int sw = img.width();
  const auto col_taps = taps_for(method, sw, width);
  const auto row_taps = taps_for(method, sh, height);

  // Horizontal pass into a double buffer, vertical pass with a single rounding.
  std::vector<double> mid(static_cast<std::size_t>(sh) * width * 3);
  for (int y = 0; y < sh; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto& t = col_taps[static_cast<std::size_t>(x)];
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < t.weights.size(); ++k) s += t.weights[k] * img.at(y, t.first + static_cast<int>(k), c);
        mid[(static_cast<std::size_t>(y) * width + x) * 3 + c] = s;
      }
    }
  }
  RgbImage out(height, width);
  for (int y = 0; y < height; ++y) {
    const auto& t = row_taps[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (std::size_t k = 0; k < t.weights.size(); ++k)
          s += t.weights[k] * mid[(static_cast<std::size_t>(t.first + static_cast<int>(k)) * width + x) * 3 + c];
        out.at(y, x, c) = to_u8(s);
      }
    }
  }
  return out;
}

ResampleMethod preferred_method(int src_h, int src_w, int dst_h, int dst_w) {
  const auto src_area = static_cast<long long>(src_h) * src_w;
  const auto dst_area = static_cast<long long>(dst_h) * dst_w;
  return dst_area >= src_area ? ResampleMethod::lanczos : ResampleMethod::area;
}

BitEdgeMap resize_edges_nearest(const BitEdgeMap& edges, int height, int width) {
  if (height < 1 || width < 1) throw ValidationError("resize target must be at least 1x1");
  const long long h = edges.height();
  const long long w = edges.width();
  BitEdgeMap out(height, width);
  std::vector<int> src_x(static_cast<std::size_t>(width));
  for (int j = 0; j < width; ++j) src_x[static_cast<std::size_t>(j)] = static_cast<int>(((2LL * j + 1) * w) / (2LL * width));
  for (int i = 0; i < height; ++i) {
    const int sy = static_cast<int>(((2LL * i + 1) * h) / (2LL * height));
    for (int j = 0; j < width; ++j)
      if (edges.get(sy, src_x[static_cast<std::size_t>(j)])) out.set(i, j);
  }
  return out;
}

}  // namespace edgereplay::imaging
