#pragma once

#include <span>
#include <string>

namespace edgereplay::prompts {

struct Dims {
  int height = 0;
  int width = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};

// How the short side gamma of a generator input is chosen per image.
//   fixed512         gamma = 512
//   caltech_adaptive gamma = 512 when min(h, w) >= 512, else 256
//   fixed            a caller-chosen multiple of 64 (desk-scale runs)
struct GammaPolicy {
  enum class Kind { fixed512, caltech_adaptive, fixed };
  Kind kind = Kind::fixed512;
  int gamma = 512;

  static GammaPolicy fixed512() { return {Kind::fixed512, 512}; }
  static GammaPolicy caltech_adaptive() { return {Kind::caltech_adaptive, 0}; }
  static GammaPolicy fixed_at(int gamma);
  // "fixed512", "caltech_adaptive" or "fixed:<gamma>".
  static GammaPolicy parse(const std::string& text);
  std::string name() const;
};

int choose_gamma(int h, int w, const GammaPolicy& policy);

// Generator input size for an h x w image: the short side becomes gamma, the
// long side the multiple of 64 nearest to the aspect-preserving scaled long
// side (ties round up). Both sides are multiples of 64.
Dims target_dims(int h, int w, int gamma);

// Mean over images of (H W) / (h w).
double avg_area_ratio(std::span<const Dims> dims, const GammaPolicy& policy);

// Edge maps storable in one memory unit: 24 / ratio, never above 24.
double capacity_per_unit(double ratio);

inline constexpr double kBitsPerRgbPixel = 24.0;

}  // namespace edgereplay::prompts
