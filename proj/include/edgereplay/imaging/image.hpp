#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace edgereplay::imaging {

// Row-major 8-bit RGB image.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int height, int width, std::uint8_t fill = 0);
  RgbImage(int height, int width, std::vector<std::uint8_t> pixels);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  bool empty() const noexcept { return pixels_.empty(); }

  std::uint8_t& at(int y, int x, int c) { return pixels_[index(y, x) + static_cast<std::size_t>(c)]; }
  std::uint8_t at(int y, int x, int c) const { return pixels_[index(y, x) + static_cast<std::size_t>(c)]; }
  void set(int y, int x, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t index(int y, int x) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// Row-major 8-bit single-channel image.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int height, int width, std::uint8_t fill = 0);
  GrayImage(int height, int width, std::vector<std::uint8_t> samples);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }

  std::uint8_t& at(int y, int x) { return samples_[index(y, x)]; }
  std::uint8_t at(int y, int x) const { return samples_[index(y, x)]; }

  std::span<const std::uint8_t> samples() const noexcept { return samples_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> samples_;
};

// Binary image packed one bit per pixel, most significant bit first. Each row
// starts on a byte boundary; padding bits past `width` are always zero.
class BitEdgeMap {
 public:
  BitEdgeMap() = default;
  BitEdgeMap(int height, int width);
  // Takes ownership of packed rows. Throws DecodeError on a size mismatch or
  // nonzero padding bits.
  BitEdgeMap(int height, int width, std::vector<std::uint8_t> packed);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t bytes_per_row() const noexcept { return stride_; }

  bool get(int y, int x) const {
    return (bits_[row_offset(y) + static_cast<std::size_t>(x >> 3)] >> (7 - (x & 7))) & 1u;
  }
  void set(int y, int x, bool on = true);

  std::size_t count() const;
  std::span<const std::uint8_t> packed() const noexcept { return bits_; }

  friend bool operator==(const BitEdgeMap&, const BitEdgeMap&) = default;

 private:
  std::size_t row_offset(int y) const { return static_cast<std::size_t>(y) * stride_; }

  int height_ = 0;
  int width_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint8_t> bits_;
};

// ITU-R BT.601 luma, rounded half away from zero.
GrayImage to_grayscale(const RgbImage& img);

// 0/255 rendering of an edge map, the form external generators consume.
GrayImage edges_to_gray(const BitEdgeMap& edges);
// Pixels >= 128 become edges.
BitEdgeMap gray_to_edges(const GrayImage& gray);

}  // namespace edgereplay::imaging
