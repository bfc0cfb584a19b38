#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include "edgereplay/imaging/image.hpp"

namespace edgereplay::regen {

struct CacheStats {
  std::size_t hits = 0;
  std::size_t misses = 0;
  std::size_t writes = 0;
  std::size_t corrupt = 0;    // entries that failed verification and were regenerated
  std::size_t conflicts = 0;  // a later write disagreed with the stored entry
};

// Content-addressed store of raw generator outputs:
//   <root>/<key[0:2]>/<key>.png      the image
//   <root>/<key[0:2]>/<key>.sha256   digest of the PNG bytes
// The first writer of a key wins; later writes compare against it.
class GenerationCache {
 public:
  explicit GenerationCache(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }

  // nullopt on a miss or on an entry that fails verification.
  std::optional<imaging::RgbImage> get(const std::string& key);
  void put(const std::string& key, const imaging::RgbImage& img);

  CacheStats stats() const;

 private:
  std::filesystem::path image_path(const std::string& key) const;
  std::filesystem::path sum_path(const std::string& key) const;

  std::filesystem::path root_;
  std::mutex write_mu_;
  std::atomic<std::size_t> hits_{0}, misses_{0}, writes_{0}, corrupt_{0}, conflicts_{0};
};

}  // namespace edgereplay::regen
