#include "edgereplay/prompts/dims.hpp"

#include <algorithm>
#include <charconv>

#include "edgereplay/common/error.hpp"

namespace edgereplay::prompts {

GammaPolicy GammaPolicy::fixed_at(int gamma) {
  if (gamma < 64 || gamma % 64 != 0) throw ValidationError("gamma must be a positive multiple of 64");
  return {Kind::fixed, gamma};
}

GammaPolicy GammaPolicy::parse(const std::string& text) {
  if (text == "fixed512") return fixed512();
  if (text == "caltech_adaptive") return caltech_adaptive();
  if (text.rfind("fixed:", 0) == 0) {
    int g = 0;
    auto tail = std::string_view(text).substr(6);
    auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), g);
    if (ec != std::errc() || ptr != tail.data() + tail.size()) throw ValidationError("bad gamma policy: " + text);
    return fixed_at(g);
  }
  throw ValidationError("unknown gamma policy: " + text);
}

std::string GammaPolicy::name() const {
  switch (kind) {
    case Kind::fixed512: return "fixed512";
    case Kind::caltech_adaptive: return "caltech_adaptive";
    case Kind::fixed: return "fixed:" + std::to_string(gamma);
  }
  return {};
}

int choose_gamma(int h, int w, const GammaPolicy& policy) {
  if (h < 1 || w < 1) throw ValidationError("image dimensions must be positive");
  switch (policy.kind) {
    case GammaPolicy::Kind::fixed512: return 512;
    case GammaPolicy::Kind::caltech_adaptive: return std::min(h, w) >= 512 ? 512 : 256;
    case GammaPolicy::Kind::fixed: return policy.gamma;
  }
  return 512;
}

Dims target_dims(int h, int w, int gamma) {
  if (h < 1 || w < 1) throw ValidationError("image dimensions must be positive");
  if (gamma < 64 || gamma % 64 != 0) throw ValidationError("gamma must be a positive multiple of 64");
  const long long shorter = std::min(h, w);
  const long long longer = std::max(h, w);
  // Nearest multiple of 64 to longer * gamma / shorter, ties up, in integers:
  // floor(longer * gamma / (64 shorter) + 1/2).
  const long long units = (2 * longer * gamma + 64 * shorter) / (128 * shorter);
  const int long_side = static_cast<int>(std::max(1LL, units) * 64);
  return h <= w ? Dims{gamma, long_side} : Dims{long_side, gamma};
}

double avg_area_ratio(std::span<const Dims> dims, const GammaPolicy& policy) {
  if (dims.empty()) throw ValidationError("avg_area_ratio needs at least one image");
  double total = 0.0;
  for (const auto& d : dims) {
    const auto t = target_dims(d.height, d.width, choose_gamma(d.height, d.width, policy));
    total += (static_cast<double>(t.height) * t.width) / (static_cast<double>(d.height) * d.width);
  }
  return total / static_cast<double>(dims.size());
}

double capacity_per_unit(double ratio) {
  if (!(ratio > 0.0)) throw ValidationError("area ratio must be positive");
  return kBitsPerRgbPixel / std::max(ratio, 1.0);
}

}  // namespace edgereplay::prompts
