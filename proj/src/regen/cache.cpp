#include "edgereplay/regen/cache.hpp"

#include <string_view>

#include "edgereplay/common/digest.hpp"
#include "edgereplay/common/error.hpp"
#include "edgereplay/common/fs.hpp"
#include "edgereplay/imaging/png_io.hpp"

namespace edgereplay::regen {

namespace fs = std::filesystem;

GenerationCache::GenerationCache(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path GenerationCache::image_path(const std::string& key) const { return root_ / key.substr(0, 2) / (key + ".png"); }

fs::path GenerationCache::sum_path(const std::string& key) const { return root_ / key.substr(0, 2) / (key + ".sha256"); }

std::optional<imaging::RgbImage> GenerationCache::get(const std::string& key) {
  const auto img_path = image_path(key);
  const auto chk_path = sum_path(key);
  std::error_code ec;
  if (!fs::exists(img_path, ec) || !fs::exists(chk_path, ec)) {
    ++misses_;
    return std::nullopt;
  }
  try {
    const auto bytes = read_file(img_path);
    const auto expected = read_file(chk_path);
    if (sha256_hex(bytes) != std::string_view(reinterpret_cast<const char*>(expected.data()), expected.size()))
      throw DecodeError("checksum mismatch");
    auto img = imaging::decode_png(bytes);
    ++hits_;
    return img;
  } catch (const Error&) {
    ++corrupt_;
    ++misses_;
    std::lock_guard lock(write_mu_);
    fs::remove(img_path, ec);
    fs::remove(chk_path, ec);
    return std::nullopt;
  }
}

void GenerationCache::put(const std::string& key, const imaging::RgbImage& img) {
  const auto bytes = imaging::encode_png(img);
  const auto digest = sha256_hex(bytes);
  std::lock_guard lock(write_mu_);
  std::error_code ec;
  if (fs::exists(sum_path(key), ec) && fs::exists(image_path(key), ec)) {
    const auto existing = read_file(sum_path(key));
    if (std::string_view(reinterpret_cast<const char*>(existing.data()), existing.size()) != digest) ++conflicts_;
    return;
  }
  write_file_atomic(image_path(key), bytes);
  write_file_atomic(sum_path(key), digest);
  ++writes_;
}

CacheStats GenerationCache::stats() const {
  return {hits_.load(), misses_.load(), writes_.load(), corrupt_.load(), conflicts_.load()};
}

}  // namespace edgereplay::regen
