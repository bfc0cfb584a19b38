#pragma once

#include "edgereplay/regen/backend.hpp"

namespace edgereplay::regen {

// Deterministic procedural stand-in for a diffusion generator.
//  1. the object hue is the first colour word in the text (red, orange, ...,
//     pink), or a hue hashed from the text when there is none
//  2. regions bounded by the dilated edges are flood-filled: enclosed regions
//     in the object hue, regions touching the frame in random neutral tones;
//     the seed drives every jitter, the noise and an illumination ramp
//  3. dilated edge pixels become dark gray ink
//  4. 3x3 box blur
class StubBackend final : public GenerationBackend {
 public:
  static constexpr const char* kIdentifier = "stub-regionfill-v1";

  std::string identifier() const override { return kIdentifier; }
  imaging::RgbImage generate_raw(const imaging::BitEdgeMap& edges, const std::string& text, std::uint64_t seed) override;
};

imaging::RgbImage stub_generate(const imaging::BitEdgeMap& edges, const std::string& text, std::uint64_t seed);

}  // namespace edgereplay::regen
