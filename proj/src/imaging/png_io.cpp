#include "edgereplay/imaging/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <string>

#include "edgereplay/common/error.hpp"
#include "edgereplay/common/fs.hpp"

namespace edgereplay::imaging {

namespace {

// Generator output is noisy; level 3 with the Sub filter encodes ~10x faster
// than zlib 6 with adaptive filters for a few percent more bytes.
constexpr int kLevel = 3;
constexpr int kFilter = PNG_FILTER_SUB;

struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

std::vector<std::uint8_t> read_as(std::span<const std::uint8_t> bytes, png_uint_32 format, int& height, int& width) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size()))
    throw DecodeError(std::string("PNG: ") + png.image.message);
  png.image.format = format;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, buf.data(), 0, nullptr))
    throw DecodeError(std::string("PNG: ") + png.image.message);
  height = static_cast<int>(png.image.height);
  width = static_cast<int>(png.image.width);
  return buf;
}

void append_bytes(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

// One pass through libpng's full writer. The simplified API encodes twice to
// learn the size and its adaptive filtering is slow on noisy images.
std::vector<std::uint8_t> write_as(std::span<const std::uint8_t> pixels, int height, int width, int color_type,
                                   int channels) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error("PNG encode: out of memory");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error("PNG encode: out of memory");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int y = 0; y < height; ++y)
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width) * channels);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error("PNG encode failed");
  }
  png_set_write_fn(png, &out, append_bytes, nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, kFilter);
  png_set_compression_level(png, kLevel);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

}  // namespace

RgbImage decode_png(std::span<const std::uint8_t> bytes) {
  int h = 0, w = 0;
  auto buf = read_as(bytes, PNG_FORMAT_RGB, h, w);
  return RgbImage(h, w, std::move(buf));
}

GrayImage decode_png_gray(std::span<const std::uint8_t> bytes) {
  int h = 0, w = 0;
  auto buf = read_as(bytes, PNG_FORMAT_GRAY, h, w);
  return GrayImage(h, w, std::move(buf));
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  return write_as(img.pixels(), img.height(), img.width(), PNG_COLOR_TYPE_RGB, 3);
}

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
  return write_as(img.samples(), img.height(), img.width(), PNG_COLOR_TYPE_GRAY, 1);
}

RgbImage load_png(const std::filesystem::path& path) { return decode_png(read_file(path)); }

void save_png(const std::filesystem::path& path, const RgbImage& img) { write_file_atomic(path, encode_png(img)); }

}  // namespace edgereplay::imaging
