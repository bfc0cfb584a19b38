#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "edgereplay/imaging/canny.hpp"
#include "edgereplay/memory/store.hpp"
#include "edgereplay/prompts/dims.hpp"
#include "edgereplay/prompts/labels.hpp"
#include "edgereplay/prompts/visual.hpp"
#include "edgereplay/regen/generator.hpp"
#include "edgereplay/harness/dataset.hpp"

namespace edgereplay::harness {

// Images grouped by class: <dir>/<class_id>/<source_id>.png, class ids
// 0..C-1 as plain integers (leading zeros allowed).
struct ImageCollection {
  std::vector<std::vector<Sample>> by_class;
};

// Throws ValidationError for a missing directory, a non-numeric class folder,
// a class id outside the label table or a class without images; DecodeError
// for unreadable PNGs.
ImageCollection load_image_dir(const std::filesystem::path& dir, std::size_t num_labels);

// Writes <dir>/train/<cid>/<source>.png, <dir>/test/... and <dir>/labels.txt.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);

struct CompressOptions {
  prompts::GammaPolicy gamma = prompts::GammaPolicy::fixed512();
  prompts::ResizeScheme scheme = prompts::ResizeScheme::edge_first;
  imaging::CannyParams canny;
  int units_per_class = 5;
  double alpha = 0.0;
  double capacity = 0.0;  // 0 derives it from the images
};

// Herding over featurised images, ledger allocation, prompt extraction.
memory::ExemplarStore compress_collection(const ImageCollection& images, const prompts::LabelTable& labels,
                                          const CompressOptions& opts);

struct RegenerateSummary {
  std::size_t prompts = 0;
  std::size_t images = 0;
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
};

// K images per prompt to <out>/<cid>/<source>_k<k>.png. Rewrites identical
// files on a rerun.
RegenerateSummary regenerate_store(const memory::ExemplarStore& store, int copies, std::uint64_t base_seed,
                                   regen::Generator& gen, const std::filesystem::path& out);

}  // namespace edgereplay::harness
