#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgereplay/common/error.hpp"
#include "edgereplay/imaging/image.hpp"
#include "edgereplay/prompts/visual.hpp"
#include "edgereplay/regen/backend.hpp"
#include "edgereplay/regen/cache.hpp"

namespace edgereplay::regen {

struct CopyResult {
  int k = 0;  // 1-based copy index
  std::uint64_t seed = 0;
  std::string cache_key;
  std::optional<imaging::RgbImage> image;
  std::string error;  // set when image is empty
  bool retryable = false;
  BackendError::Kind error_kind = BackendError::Kind::server;
};

// Front end over a backend: caching, resize back to the source size and
// fan-out across threads. The cache is optional.
class Generator {
 public:
  Generator(GenerationBackend& backend, GenerationCache* cache, int threads = 1);

  const std::string& backend_id() const noexcept { return backend_id_; }
  GenerationCache* cache() const noexcept { return cache_; }
  std::size_t backend_calls() const noexcept { return backend_calls_.load(); }

  // Backend output at the edge map's size, resampled to (out_h, out_w) with
  // pixel-area when shrinking and Lanczos when growing. Throws BackendError
  // (tagged with the cache key) or ValidationError.
  imaging::RgbImage generate(const GenerationRequest& req);

  // K copies with seeds copy_seed(base_seed, source_id, k), k = 1..K.
  // Failures are reported per copy.
  std::vector<CopyResult> regenerate_prompt(const prompts::PromptRecord& prompt, int copies, std::uint64_t base_seed);

  // Like regenerate_prompt for many prompts at once; throws the first failure.
  std::vector<std::vector<imaging::RgbImage>> regenerate_all(std::span<const prompts::PromptRecord> prompts, int copies,
                                                             std::uint64_t base_seed);

 private:
  GenerationBackend& backend_;
  GenerationCache* cache_;
  int threads_;
  std::string backend_id_;
  std::atomic<std::size_t> backend_calls_{0};
};

}  // namespace edgereplay::regen
