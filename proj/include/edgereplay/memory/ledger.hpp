#pragma once

#include <cstddef>
#include <vector>

namespace edgereplay::memory {

// Per-class memory budget split between real images and prompt-backed
// synthetic sources. One unit stores one original RGB image or
// `capacity_per_unit` edge maps.
struct MemoryLedger {
  int units_per_class = 0;         // b
  double alpha = 0.0;              // requested compressed proportion
  double capacity_per_unit = 24.0;
  int compressed_units = 0;        // round(alpha * b)
  int real_slots = 0;              // R = b - compressed_units
  int prompt_slots = 0;            // S = floor(compressed_units * capacity_per_unit)

  double effective_alpha() const { return static_cast<double>(compressed_units) / units_per_class; }
  friend bool operator==(const MemoryLedger&, const MemoryLedger&) = default;
};

// Throws ValidationError unless b >= 1, alpha in [0, 1] and capacity >= 1.
MemoryLedger allocate(int units_per_class, double alpha, double capacity_per_unit);

struct HerdingRank;

struct Selection {
  std::vector<std::size_t> real;            // stored as images
  std::vector<std::size_t> prompt_sources;  // compressed to prompts
  std::vector<std::size_t> discarded;
};

// The first R ranked samples stay real, the next S become prompts, the rest
// are dropped. Short classes fill real slots first.
Selection select_exemplars(const HerdingRank& ranked, const MemoryLedger& ledger);

}  // namespace edgereplay::memory
