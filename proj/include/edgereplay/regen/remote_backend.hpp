#pragma once

#include <memory>
#include <semaphore>
#include <string>

#include "edgereplay/regen/backend.hpp"

namespace edgereplay::regen {

struct RemoteOptions {
  double timeout_seconds = 120.0;
  int max_in_flight = 4;
};

// Client for the HTTP/JSON generation protocol:
//   GET  /v1/health    -> {"backend_id": string}
//   POST /v1/generate  {"edges_png": base64, "prompt": string, "seed": u64,
//                       "height": int, "width": int}
//                      -> {"image_png": base64} | {"error": {"code", "message"}}
class RemoteBackend final : public GenerationBackend {
 public:
  // Queries /v1/health; throws BackendError if the service is unreachable.
  explicit RemoteBackend(std::string endpoint, RemoteOptions opts = {});
  ~RemoteBackend() override;

  std::string identifier() const override { return backend_id_; }
  const std::string& endpoint() const noexcept { return endpoint_; }

  // Throws BackendError: timeout / transport (retryable), protocol for 4xx or
  // malformed bodies, server for 5xx, dimension_mismatch when the returned
  // image is not H x W. The cache key field is left empty; Generator fills it.
  imaging::RgbImage generate_raw(const imaging::BitEdgeMap& edges, const std::string& text, std::uint64_t seed) override;

 private:
  std::string endpoint_;
  RemoteOptions opts_;
  std::string backend_id_;
  std::unique_ptr<std::counting_semaphore<>> in_flight_;
};

}  // namespace edgereplay::regen
