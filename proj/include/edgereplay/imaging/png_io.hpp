#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "edgereplay/imaging/image.hpp"

namespace edgereplay::imaging {

// Any PNG colour type is converted to 8-bit RGB. Throws DecodeError.
RgbImage decode_png(std::span<const std::uint8_t> bytes);
GrayImage decode_png_gray(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encode_png(const RgbImage& img);
std::vector<std::uint8_t> encode_png(const GrayImage& img);

RgbImage load_png(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const RgbImage& img);

}  // namespace edgereplay::imaging
