#include "edgereplay/common/rng.hpp"

#include <cmath>
#include <numbers>

#include "edgereplay/common/digest.hpp"

namespace edgereplay {

double Rng::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  // Largest multiple of n representable; values at or above it are rejected.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
  std::uint64_t v;
  do {
    v = next();
  } while (v > limit);
  return v % n;
}

double Rng::normal() {
  double u1 = uniform01();
  double u2 = uniform01();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag, std::uint64_t index) {
  return DigestBuilder().add_u64(parent).add_string(tag).add_u64(index).u64();
}

}  // namespace edgereplay
