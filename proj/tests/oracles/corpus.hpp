#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "edgereplay/imaging/image.hpp"

namespace testkit {

// Seeded mix of disks, bars, ramps, checkerboards and noise, all sides in
// [1, 64] (a few under 5 to exercise padding).
std::vector<edgereplay::imaging::RgbImage> canny_corpus(std::size_t count, std::uint64_t seed);

// Removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "er");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

// Every regular file under root keyed by relative path.
std::vector<std::pair<std::string, std::vector<std::uint8_t>>> tree_bytes(const std::filesystem::path& root);

}  // namespace testkit
