#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "edgereplay/common/rng.hpp"

namespace edgereplay::harness {

// One training source: a real image with its generated copies, or a stored
// prompt that only exists through its copies. Indices point into a feature
// table owned by the caller.
struct PoolItem {
  enum class Kind { new_real, exemplar_real, prompt };
  Kind kind = Kind::new_real;
  int class_id = 0;
  std::size_t real = 0;             // unused for prompts
  std::vector<std::size_t> copies;  // K generated copies
};

struct SamplingParams {
  double p = 0.0;  // probability a real image is swapped for a copy
  int copies = 0;  // K
  bool augment_exemplars = true;
};

struct EpochEntry {
  std::size_t feature = 0;
  int class_id = 0;
  std::size_t item = 0;
  int copy = -1;  // -1: the real image, else index into the item's copies
};

// Checks the pool against the parameters. Throws ValidationError when p > 0
// with K = 0, when a real item needing replacement lacks K copies, or when a
// prompt item has no copies.
void validate_pool(std::span<const PoolItem> pool, const SamplingParams& params);

// One epoch: new-class images are each replaced with probability p by a
// uniformly chosen copy, real exemplars likewise when augment_exemplars is set,
// every prompt contributes exactly one uniformly chosen copy. The result is
// shuffled.
std::vector<EpochEntry> epoch_view(std::span<const PoolItem> pool, const SamplingParams& params, Rng& rng);

}  // namespace edgereplay::harness
