#include "edgereplay/regen/backend.hpp"

#include "edgereplay/common/digest.hpp"
#include "edgereplay/common/error.hpp"
#include "edgereplay/regen/remote_backend.hpp"
#include "edgereplay/regen/stub_backend.hpp"

namespace edgereplay::regen {

void GenerationRequest::validate() const {
  if (edges.height() % 64 != 0 || edges.width() % 64 != 0 || edges.height() < 64 || edges.width() < 64)
    throw ValidationError("generation request: edge map sides must be multiples of 64");
  if (out_h < 1 || out_w < 1) throw ValidationError("generation request: output size must be positive");
  if (text.text().empty()) throw ValidationError("generation request: empty prompt");
}

std::unique_ptr<GenerationBackend> make_backend(const BackendDescriptor& desc) {
  if (desc.kind == BackendDescriptor::Kind::stub) return std::make_unique<StubBackend>();
  RemoteOptions opts;
  opts.timeout_seconds = desc.timeout_seconds;
  opts.max_in_flight = desc.max_in_flight;
  return std::make_unique<RemoteBackend>(desc.endpoint, opts);
}

std::string cache_key(const imaging::BitEdgeMap& edges, const std::string& text, std::uint64_t seed,
                      const std::string& backend_id) {
  return DigestBuilder()
      .add_string("generation-v1")
      .add_u64(static_cast<std::uint64_t>(edges.height()))
      .add_u64(static_cast<std::uint64_t>(edges.width()))
      .add_bytes(edges.packed())
      .add_string(text)
      .add_u64(seed)
      .add_string(backend_id)
      .hex();
}

std::uint64_t copy_seed(std::uint64_t base_seed, const std::string& source_id, int k) {
  return DigestBuilder()
      .add_string("copy-seed")
      .add_u64(base_seed)
      .add_string(source_id)
      .add_u64(static_cast<std::uint64_t>(k))
      .u64();
}

}  // namespace edgereplay::regen
