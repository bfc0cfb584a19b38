#include "edgereplay/imaging/image.hpp"

#include <bit>
#include <string>

#include "edgereplay/common/error.hpp"

namespace edgereplay::imaging {

namespace {

void check_dims(int height, int width) {
  if (height < 1 || width < 1)
    throw ValidationError("image dimensions must be positive, got " + std::to_string(height) + "x" +
                          std::to_string(width));
}

std::size_t area(int height, int width) {
  return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
}

}  // namespace

RgbImage::RgbImage(int height, int width, std::uint8_t fill) : height_(height), width_(width) {
  check_dims(height, width);
  pixels_.assign(area(height, width) * 3, fill);
}

RgbImage::RgbImage(int height, int width, std::vector<std::uint8_t> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  check_dims(height, width);
  if (pixels_.size() != area(height, width) * 3) throw ValidationError("RGB buffer size mismatch");
}

void RgbImage::set(int y, int x, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  auto i = index(y, x);
  pixels_[i] = r;
  pixels_[i + 1] = g;
  pixels_[i + 2] = b;
}

GrayImage::GrayImage(int height, int width, std::uint8_t fill) : height_(height), width_(width) {
  check_dims(height, width);
  samples_.assign(area(height, width), fill);
}

GrayImage::GrayImage(int height, int width, std::vector<std::uint8_t> samples)
    : height_(height), width_(width), samples_(std::move(samples)) {
  check_dims(height, width);
  if (samples_.size() != area(height, width)) throw ValidationError("gray buffer size mismatch");
}

BitEdgeMap::BitEdgeMap(int height, int width)
    : height_(height), width_(width), stride_((static_cast<std::size_t>(width) + 7) / 8) {
  check_dims(height, width);
  bits_.assign(stride_ * static_cast<std::size_t>(height), 0);
}

BitEdgeMap::BitEdgeMap(int height, int width, std::vector<std::uint8_t> packed)
    : height_(height), width_(width), stride_((static_cast<std::size_t>(width) + 7) / 8), bits_(std::move(packed)) {
  if (height < 1 || width < 1) throw DecodeError("edge map dimensions must be positive");
  if (bits_.size() != stride_ * static_cast<std::size_t>(height)) throw DecodeError("edge map payload size mismatch");
  const int tail = width & 7;
  if (tail != 0) {
    const auto pad_mask = static_cast<std::uint8_t>(0xFFu >> tail);
    for (int y = 0; y < height; ++y)
      if (bits_[row_offset(y) + stride_ - 1] & pad_mask) throw DecodeError("nonzero padding bits in edge map");
  }
}

void BitEdgeMap::set(int y, int x, bool on) {
  auto& byte = bits_[row_offset(y) + static_cast<std::size_t>(x >> 3)];
  const auto mask = static_cast<std::uint8_t>(0x80u >> (x & 7));
  byte = on ? static_cast<std::uint8_t>(byte | mask) : static_cast<std::uint8_t>(byte & ~mask);
}

std::size_t BitEdgeMap::count() const {
  std::size_t n = 0;
  for (auto b : bits_) n += static_cast<std::size_t>(std::popcount(b));
  return n;
}

GrayImage to_grayscale(const RgbImage& img) {
  GrayImage out(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      // Fixed-point BT.601: weights scaled by 1000 so the rounding is exact.
      const int sum = 299 * img.at(y, x, 0) + 587 * img.at(y, x, 1) + 114 * img.at(y, x, 2);
      const int luma = (sum + 500) / 1000;
      out.at(y, x) = static_cast<std::uint8_t>(luma > 255 ? 255 : luma);
    }
  }
  return out;
}

GrayImage edges_to_gray(const BitEdgeMap& edges) {
  GrayImage out(edges.height(), edges.width());
  for (int y = 0; y < edges.height(); ++y)
    for (int x = 0; x < edges.width(); ++x) out.at(y, x) = edges.get(y, x) ? 255 : 0;
  return out;
}

BitEdgeMap gray_to_edges(const GrayImage& gray) {
  BitEdgeMap out(gray.height(), gray.width());
  for (int y = 0; y < gray.height(); ++y)
    for (int x = 0; x < gray.width(); ++x)
      if (gray.at(y, x) >= 128) out.set(y, x);
  return out;
}

}  // namespace edgereplay::imaging
