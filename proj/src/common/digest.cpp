#include "edgereplay/common/digest.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include "edgereplay/common/error.hpp"

namespace edgereplay {

Sha256 sha256(std::span<const std::uint8_t> bytes) {
  Sha256 out{};
  SHA256(bytes.data(), bytes.size(), out.data());
  return out;
}

Sha256 sha256(std::string_view text) {
  return sha256(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

DigestBuilder& DigestBuilder::add_u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  return *this;
}

DigestBuilder& DigestBuilder::add_string(std::string_view s) {
  return add_bytes(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

DigestBuilder& DigestBuilder::add_bytes(std::span<const std::uint8_t> bytes) {
  add_u64(bytes.size());
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
  return *this;
}

Sha256 DigestBuilder::finish() const { return sha256(buf_); }

std::string DigestBuilder::hex() const { return to_hex(finish()); }

std::uint64_t DigestBuilder::u64() const {
  auto d = finish();
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(d[i]) << (8 * i);
  return v;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                          static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw DecodeError("base64: length not a multiple of 4");
  std::vector<std::uint8_t> out(3 * (text.size() / 4));
  if (text.empty()) return out;
  int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                          static_cast<int>(text.size()));
  if (n < 0) throw DecodeError("base64: invalid characters");
  // EVP_DecodeBlock keeps the bytes that stand in for '=' padding.
  std::size_t pad = 0;
  if (text.back() == '=') ++pad;
  if (text.size() >= 2 && text[text.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

}  // namespace edgereplay
