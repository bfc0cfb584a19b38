#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "edgereplay/imaging/image.hpp"
#include "edgereplay/prompts/labels.hpp"

namespace edgereplay::regen {

struct GenerationRequest {
  imaging::BitEdgeMap edges;  // H x W, multiples of 64
  prompts::TextualPrompt text;
  std::uint64_t seed = 0;
  int out_h = 0;  // size the result is resampled to
  int out_w = 0;

  // Throws ValidationError.
  void validate() const;
};

// Anything that turns (edges, text, seed) into an image of the edge map's size.
class GenerationBackend {
 public:
  virtual ~GenerationBackend() = default;
  // Changes whenever generation semantics change; part of every cache key.
  virtual std::string identifier() const = 0;
  virtual imaging::RgbImage generate_raw(const imaging::BitEdgeMap& edges, const std::string& text, std::uint64_t seed) = 0;
};

struct BackendDescriptor {
  enum class Kind { stub, remote };
  Kind kind = Kind::stub;
  std::string endpoint;          // remote only, e.g. "http://127.0.0.1:8080"
  double timeout_seconds = 120;  // remote only
  int max_in_flight = 4;         // remote only
};

// Remote backends ask the service for its identifier on construction.
std::unique_ptr<GenerationBackend> make_backend(const BackendDescriptor& desc);

// Digest of (edge bytes, text, seed, backend identifier) in hex.
std::string cache_key(const imaging::BitEdgeMap& edges, const std::string& text, std::uint64_t seed,
                      const std::string& backend_id);

// Seed of copy k generated from the sample `source_id`.
std::uint64_t copy_seed(std::uint64_t base_seed, const std::string& source_id, int k);

}  // namespace edgereplay::regen
