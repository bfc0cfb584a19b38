#include "edgereplay/imaging/ebm.hpp"

#include <cstring>

#include "edgereplay/common/error.hpp"

namespace edgereplay::imaging {

namespace {

constexpr std::uint8_t kMagic[4] = {'E', 'B', 'M', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[at + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_ebm(const BitEdgeMap& edges, int orig_h, int orig_w) {
  if (orig_h < 1 || orig_w < 1) throw ValidationError("original dimensions must be positive");
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  out.reserve(kEbmHeaderBytes + edges.packed().size());
  put_u32(out, static_cast<std::uint32_t>(edges.height()));
  put_u32(out, static_cast<std::uint32_t>(edges.width()));
  put_u32(out, static_cast<std::uint32_t>(orig_h));
  put_u32(out, static_cast<std::uint32_t>(orig_w));
  out.insert(out.end(), edges.packed().begin(), edges.packed().end());
  return out;
}

DecodedEbm decode_ebm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kEbmHeaderBytes) throw DecodeError("EBM1: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw DecodeError("EBM1: bad magic");
  const auto h = get_u32(bytes, 4);
  const auto w = get_u32(bytes, 8);
  const auto oh = get_u32(bytes, 12);
  const auto ow = get_u32(bytes, 16);
  constexpr std::uint32_t kMaxDim = 1u << 20;
  if (h == 0 || w == 0 || oh == 0 || ow == 0) throw DecodeError("EBM1: zero dimension");
  if (h > kMaxDim || w > kMaxDim || oh > kMaxDim || ow > kMaxDim) throw DecodeError("EBM1: dimension out of range");
  const std::size_t expected = static_cast<std::size_t>(h) * ((static_cast<std::size_t>(w) + 7) / 8);
  const std::size_t have = bytes.size() - kEbmHeaderBytes;
  if (have < expected) throw DecodeError("EBM1: truncated payload");
  if (have > expected) throw DecodeError("EBM1: trailing bytes after payload");
  std::vector<std::uint8_t> packed(bytes.begin() + kEbmHeaderBytes, bytes.end());
  return DecodedEbm{BitEdgeMap(static_cast<int>(h), static_cast<int>(w), std::move(packed)), static_cast<int>(oh),
                    static_cast<int>(ow)};
}

}  // namespace edgereplay::imaging
