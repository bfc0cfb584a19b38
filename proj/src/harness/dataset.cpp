#include "edgereplay/harness/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "edgereplay/common/error.hpp"
#include "edgereplay/common/rng.hpp"

namespace edgereplay::harness {

namespace {

constexpr std::array<const char*, 8> kShapeNames = {"triangle", "square",  "pentagon", "hexagon",
                                                     "heptagon", "octagon", "nonagon",  "decagon"};
constexpr std::array<const char*, 12> kHueNames = {"red",  "orange", "yellow", "lime",   "green",  "teal",
                                                   "cyan", "azure",  "blue",   "violet", "purple", "pink"};

struct Rgb {
  double r, g, b;
};

Rgb hsv(double h, double s, double v) {
  h = h - std::floor(h);
  const double c = v * s, hp = h * 6.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  Rgb o{};
  switch (static_cast<int>(hp) % 6) {
    case 0: o = {c, x, 0}; break;
    case 1: o = {x, c, 0}; break;
    case 2: o = {0, c, x}; break;
    case 3: o = {0, x, c}; break;
    case 4: o = {x, 0, c}; break;
    default: o = {c, 0, x}; break;
  }
  const double m = v - c;
  return {255 * (o.r + m), 255 * (o.g + m), 255 * (o.b + m)};
}

double luma(const Rgb& c) { return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b; }

std::string letters(int n) {
  std::string s;
  do {
    s.insert(s.begin(), static_cast<char>('a' + n % 26));
    n = n / 26 - 1;
  } while (n >= 0);
  return s;
}

bool inside(const std::vector<std::array<double, 2>>& poly, double y, double x) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const auto [yi, xi] = poly[i];
    const auto [yj, xj] = poly[j];
    if ((yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi) in = !in;
  }
  return in;
}

double class_hue(int c, int num_classes) { return static_cast<double>(c) / num_classes; }

// Class hue at a fixed luma with as much chroma as fits in [0, 255].
Rgb fill_colour(double hue, double luma_target, double chroma) {
  const Rgb pure = hsv(hue, 1.0, 1.0);
  const double lp = luma(pure);
  const Rgb dir{pure.r - lp, pure.g - lp, pure.b - lp};
  double t = 10.0;
  for (double d : {dir.r, dir.g, dir.b}) {
    if (d > 1e-9) t = std::min(t, (255.0 - luma_target) / d);
    if (d < -1e-9) t = std::min(t, luma_target / -d);
  }
  t *= chroma;
  return {luma_target + t * dir.r, luma_target + t * dir.g, luma_target + t * dir.b};
}

Sample render(int c, int index, const ProceduralSpec& spec, Rng& rng, PolygonGeometry& geo) {
  const int s = spec.image_size;
  geo.sides = 3 + c % 8;
  geo.radius = s * rng.uniform(0.24, 0.36);
  geo.cy = (s - 1) / 2.0 + s * rng.uniform(-0.1, 0.1);
  geo.cx = (s - 1) / 2.0 + s * rng.uniform(-0.1, 0.1);
  geo.rotation = rng.uniform(0.0, 2.0 * std::numbers::pi);

  const Rgb fill = fill_colour(class_hue(c, spec.num_classes) + rng.uniform(-0.01, 0.01), rng.uniform(120.0, 136.0),
                               rng.uniform(0.8, 1.0));
  // A dark sky over light ground, both near neutral: every side of the shape
  // keeps ~100 luma levels of contrast, and the fill colour stays visible
  // after per-channel standardisation because the background has two tones.
  const double sky = rng.uniform(15.0, 30.0), ground = rng.uniform(225.0, 240.0);
  const double horizon = s * rng.uniform(0.3, 0.7), tilt = rng.uniform(-0.3, 0.3);
  const Rgb tint{rng.uniform(-6, 6), rng.uniform(-6, 6), rng.uniform(-6, 6)};
  const double wave_amp = rng.uniform(2.0, 6.0);
  const double wave_fy = rng.uniform(0.05, 0.3), wave_fx = rng.uniform(0.05, 0.3), wave_ph = rng.uniform(0.0, 6.283);

  const auto poly = geo.vertices();
  imaging::RgbImage img(s, s);
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      Rgb px;
      if (inside(poly, y, x)) {
        px = fill;
      } else {
        const double wave = wave_amp * std::sin(wave_fy * y + wave_fx * x + wave_ph);
        const double bg = y < horizon + tilt * (x - s / 2.0) ? sky : ground;
        px = {bg + tint.r + wave, bg + tint.g + wave, bg + tint.b + wave};
      }
      const double n = 3.0 * rng.normal();
      auto q = [&](double v) { return static_cast<std::uint8_t>(std::clamp(std::round(v + n), 0.0, 255.0)); };
      img.set(y, x, q(px.r), q(px.g), q(px.b));
    }
  }
  char id[48];
  std::snprintf(id, sizeof id, "c%03d_s%04d", c, index);
  return {std::move(img), c, id};
}

}  // namespace

std::vector<std::array<double, 2>> PolygonGeometry::vertices() const {
  std::vector<std::array<double, 2>> v;
  for (int k = 0; k < sides; ++k) {
    const double a = rotation + 2.0 * std::numbers::pi * k / sides;
    v.push_back({cy + radius * std::sin(a), cx + radius * std::cos(a)});
  }
  return v;
}

Dataset procedural_dataset(const ProceduralSpec& spec) {
  if (spec.num_classes < 2) throw ValidationError("procedural dataset needs at least 2 classes");
  if (spec.per_class < 2) throw ValidationError("procedural dataset needs at least 2 samples per class");
  if (spec.image_size < 16) throw ValidationError("procedural images must be at least 16 pixels wide");

  Dataset ds;
  ds.num_classes = spec.num_classes;
  for (int c = 0; c < spec.num_classes; ++c) {
    const double hue = class_hue(c, spec.num_classes);
    const auto hue_name = kHueNames[static_cast<std::size_t>(std::lround(hue * 12)) % 12];
    char raw[96];
    std::snprintf(raw, sizeof raw, "%03d.%s-%s-%s", c + 1, hue_name, kShapeNames[static_cast<std::size_t>(c % 8)],
                  letters(c).c_str());
    ds.raw_labels.emplace_back(raw);
  }
  ds.labels = prompts::make_label_table(ds.raw_labels, prompts::LabelStyle::caltech);

  const int n_train = (spec.per_class * 8 + 9) / 10;
  for (int c = 0; c < spec.num_classes; ++c) {
    Rng rng(derive_seed(spec.seed, "procedural-class", static_cast<std::uint64_t>(c)));
    for (int i = 0; i < spec.per_class; ++i) {
      PolygonGeometry geo;
      auto sample = render(c, i, spec, rng, geo);
      if (i < n_train) {
        ds.train.push_back(std::move(sample));
        ds.train_geometry.push_back(geo);
      } else {
        ds.test.push_back(std::move(sample));
        ds.test_geometry.push_back(geo);
      }
    }
  }
  return ds;
}

}  // namespace edgereplay::harness
