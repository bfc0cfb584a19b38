#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "edgereplay/imaging/image.hpp"
#include "edgereplay/prompts/labels.hpp"

namespace edgereplay::harness {

struct Sample {
  imaging::RgbImage image;
  int class_id = 0;
  std::string source_id;
};

// Ground truth kept alongside a procedural sample so tests can compare
// extracted edges with the exact outline.
struct PolygonGeometry {
  int sides = 0;
  double cy = 0, cx = 0, radius = 0, rotation = 0;

  std::vector<std::array<double, 2>> vertices() const;  // (y, x)
};

struct Dataset {
  int num_classes = 0;
  std::vector<std::string> raw_labels;  // caltech-style, e.g. "001.red-triangle-a"
  prompts::LabelTable labels;
  std::vector<Sample> train;
  std::vector<Sample> test;
  std::vector<PolygonGeometry> train_geometry;  // parallel to train (procedural only)
  std::vector<PolygonGeometry> test_geometry;
};

struct ProceduralSpec {
  int num_classes = 10;
  int per_class = 60;
  int image_size = 64;
  std::uint64_t seed = 0;
};

// Class c draws a (3 + c mod 8)-gon in a class-keyed hue over a textured
// background, with random rotation, scale and translation per sample. The
// first 80% of each class (in generation order) is train, the rest test.
Dataset procedural_dataset(const ProceduralSpec& spec);

}  // namespace edgereplay::harness
