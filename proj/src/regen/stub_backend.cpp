#include "edgereplay/regen/stub_backend.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>
#include <utility>
#include <vector>

#include "edgereplay/common/digest.hpp"
#include "edgereplay/common/rng.hpp"

namespace edgereplay::regen {

namespace {

using Rgb = std::array<double, 3>;

Rgb hsv_to_rgb(double h, double s, double v) {
  h = h - std::floor(h);
  const double c = v * s;
  const double hp = h * 6.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  Rgb rgb{};
  switch (static_cast<int>(hp) % 6) {
    case 0: rgb = {c, x, 0}; break;
    case 1: rgb = {x, c, 0}; break;
    case 2: rgb = {0, c, x}; break;
    case 3: rgb = {0, x, c}; break;
    case 4: rgb = {x, 0, c}; break;
    default: rgb = {c, 0, x}; break;
  }
  const double m = v - c;
  return {255.0 * (rgb[0] + m), 255.0 * (rgb[1] + m), 255.0 * (rgb[2] + m)};
}

double luma(const Rgb& c) { return 0.299 * c[0] + 0.587 * c[1] + 0.114 * c[2]; }

// Colour of the given hue at a fixed luma, `chroma` of the way to the most
// saturated colour that still fits in gamut. Blue and yellow objects then
// contrast equally with the ink.
Rgb object_colour(double hue, double luma_target, double chroma) {
  const Rgb pure = hsv_to_rgb(hue, 1.0, 1.0);
  const double lp = luma(pure);
  double t = 10.0;
  for (int c = 0; c < 3; ++c) {
    const double d = pure[static_cast<std::size_t>(c)] - lp;
    if (d > 1e-9) t = std::min(t, (255.0 - luma_target) / d);
    if (d < -1e-9) t = std::min(t, luma_target / -d);
  }
  t *= chroma;
  return {luma_target + t * (pure[0] - lp), luma_target + t * (pure[1] - lp), luma_target + t * (pure[2] - lp)};
}

// Colour words the stub understands, as hues on the unit circle.
constexpr std::array<std::pair<std::string_view, double>, 12> kColourWords = {{{"red", 0.0 / 12},
                                                                            {"orange", 1.0 / 12},
                                                                            {"yellow", 2.0 / 12},
                                                                            {"lime", 3.0 / 12},
                                                                            {"green", 4.0 / 12},
                                                                            {"teal", 5.0 / 12},
                                                                            {"cyan", 6.0 / 12},
                                                                            {"azure", 7.0 / 12},
                                                                            {"blue", 8.0 / 12},
                                                                            {"violet", 9.0 / 12},
                                                                            {"purple", 10.0 / 12},
                                                                            {"pink", 11.0 / 12}}};

// Hue named by the first colour word in the prompt, else one hashed from it.
double prompt_hue(const std::string& text) {
  std::size_t at = 0;
  while (at < text.size()) {
    const auto end = std::min(text.find(' ', at), text.size());
    const std::string_view word(text.data() + at, end - at);
    for (const auto& [name, hue] : kColourWords)
      if (word == name) return hue;
    at = end + 1;
  }
  return Rng(DigestBuilder().add_string("stub-text").add_string(text).u64()).uniform01();
}

}  // namespace

imaging::RgbImage stub_generate(const imaging::BitEdgeMap& edges, const std::string& text, std::uint64_t seed) {
  const int h = edges.height();
  const int w = edges.width();

  Rng rng(DigestBuilder().add_string("stub-seed").add_string(text).add_u64(seed).u64());
  const double hue = prompt_hue(text);
  const double noise_sigma = rng.uniform(4.0, 9.0);
  // Smooth illumination ramp across the image.
  const double ramp_angle = rng.uniform(0.0, 6.283185307179586);
  const double ramp_amp = rng.uniform(0.0, 18.0);

  // Dilated edges form the region barriers.
  std::vector<std::uint8_t> barrier(static_cast<std::size_t>(h) * w, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (edges.get(y, x))
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = y + dy, nx = x + dx;
            if (ny >= 0 && ny < h && nx >= 0 && nx < w) barrier[static_cast<std::size_t>(ny) * w + nx] = 1;
          }

  // 4-connected regions in scan order. Regions touching the frame are ground
  // and get neutral tones; enclosed regions are the object and get the
  // prompt's colour.
  std::vector<int> region(static_cast<std::size_t>(h) * w, -1);
  std::vector<bool> touches_frame;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < region.size(); ++start) {
    if (barrier[start] || region[start] >= 0) continue;
    const int id = static_cast<int>(touches_frame.size());
    bool frame = false;
    region[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      const int y = static_cast<int>(i / w), x = static_cast<int>(i % w);
      if (y == 0 || x == 0 || y == h - 1 || x == w - 1) frame = true;
      const std::array<std::pair<int, int>, 4> nbrs{{{y - 1, x}, {y + 1, x}, {y, x - 1}, {y, x + 1}}};
      for (auto [ny, nx] : nbrs) {
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        const auto j = static_cast<std::size_t>(ny) * w + nx;
        if (!barrier[j] && region[j] < 0) {
          region[j] = id;
          stack.push_back(j);
        }
      }
    }
    touches_frame.push_back(frame);
  }

  std::vector<Rgb> palette;
  for (bool frame : touches_frame) {
    if (frame) {
      const double level = rng.uniform(10.0, 245.0);
      palette.push_back({level + rng.uniform(-8, 8), level + rng.uniform(-8, 8), level + rng.uniform(-8, 8)});
    } else {
      palette.push_back(object_colour(hue + rng.uniform(-0.04, 0.04), rng.uniform(120.0, 160.0), rng.uniform(0.6, 0.95)));
    }
  }
  // Near-black ink keeps the outline visible next to any object colour.
  const double ink_level = rng.uniform(0.0, 20.0);
  const Rgb ink = {ink_level, ink_level, ink_level};
  std::vector<double> canvas(static_cast<std::size_t>(h) * w * 3);
  const double cx = std::cos(ramp_angle), sy = std::sin(ramp_angle);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto i = static_cast<std::size_t>(y) * w + x;
      const Rgb& base = barrier[i] ? ink : palette[static_cast<std::size_t>(region[i])];
      const double ramp = ramp_amp * ((x / static_cast<double>(w) - 0.5) * cx + (y / static_cast<double>(h) - 0.5) * sy);
      for (int c = 0; c < 3; ++c) canvas[i * 3 + c] = base[static_cast<std::size_t>(c)] + ramp + noise_sigma * rng.normal();
    }
  }

  imaging::RgbImage out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double s = 0.0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = std::clamp(y + dy, 0, h - 1), nx = std::clamp(x + dx, 0, w - 1);
            s += canvas[(static_cast<std::size_t>(ny) * w + nx) * 3 + c];
          }
        out.at(y, x, c) = static_cast<std::uint8_t>(std::clamp(std::round(s / 9.0), 0.0, 255.0));
      }
    }
  }
  return out;
}

imaging::RgbImage StubBackend::generate_raw(const imaging::BitEdgeMap& edges, const std::string& text, std::uint64_t seed) {
  return stub_generate(edges, text, seed);
}

}  // namespace edgereplay::regen
