#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "edgereplay/imaging/image.hpp"

namespace edgereplay::imaging {

// EBM1 container, all integers little-endian:
//   "EBM1" | H:u32 | W:u32 | orig_h:u32 | orig_w:u32 | H * ceil(W / 8) packed bytes
inline constexpr std::size_t kEbmHeaderBytes = 20;

struct DecodedEbm {
  BitEdgeMap edges;
  int orig_h = 0;
  int orig_w = 0;

  friend bool operator==(const DecodedEbm&, const DecodedEbm&) = default;
};

std::vector<std::uint8_t> encode_ebm(const BitEdgeMap& edges, int orig_h, int orig_w);
// Throws DecodeError on bad magic, a truncated or oversized payload, zero
// dimensions or nonzero padding bits.
DecodedEbm decode_ebm(std::span<const std::uint8_t> bytes);

// Bytes of packed pixel data in a container (header excluded).
inline std::size_t ebm_payload_bytes(const BitEdgeMap& edges) { return edges.packed().size(); }

}  // namespace edgereplay::imaging
