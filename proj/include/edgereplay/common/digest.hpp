#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace edgereplay {

using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::span<const std::uint8_t> bytes);
Sha256 sha256(std::string_view text);
std::string to_hex(std::span<const std::uint8_t> bytes);
inline std::string sha256_hex(std::span<const std::uint8_t> bytes) { return to_hex(sha256(bytes)); }

// Incremental digest with an injective field encoding: every variable-length
// field is prefixed by its length, so distinct field tuples never collide on
// the encoded byte stream.
class DigestBuilder {
 public:
  DigestBuilder& add_u64(std::uint64_t v);
  DigestBuilder& add_string(std::string_view s);
  DigestBuilder& add_bytes(std::span<const std::uint8_t> bytes);

  Sha256 finish() const;
  std::string hex() const;
  // First eight digest bytes read little-endian.
  std::uint64_t u64() const;

 private:
  std::vector<std::uint8_t> buf_;
};

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws DecodeError on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace edgereplay
