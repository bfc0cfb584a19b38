#include "edgereplay/memory/ledger.hpp"

#include <algorithm>
#include <cmath>

#include "edgereplay/common/error.hpp"
#include "edgereplay/memory/herding.hpp"

namespace edgereplay::memory {

MemoryLedger allocate(int units_per_class, double alpha, double capacity_per_unit) {
  if (units_per_class < 1) throw ValidationError("units per class must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
  if (!(capacity_per_unit >= 1.0) || !std::isfinite(capacity_per_unit))
    throw ValidationError("capacity per unit must be >= 1");
  MemoryLedger ledger;
  ledger.units_per_class = units_per_class;
  ledger.alpha = alpha;
  ledger.capacity_per_unit = capacity_per_unit;
  ledger.compressed_units =
      std::clamp(static_cast<int>(std::lround(alpha * units_per_class)), 0, units_per_class);
  ledger.real_slots = units_per_class - ledger.compressed_units;
  // The epsilon keeps products such as 5 * 19.2 from flooring to 95.
  ledger.prompt_slots = static_cast<int>(std::floor(ledger.compressed_units * capacity_per_unit + 1e-9));
  return ledger;
}

Selection select_exemplars(const HerdingRank& ranked, const MemoryLedger& ledger) {
  Selection s;
  const auto n = ranked.ordering.size();
  const auto r = std::min(n, static_cast<std::size_t>(ledger.real_slots));
  const auto p = std::min(n - r, static_cast<std::size_t>(ledger.prompt_slots));
  s.real.assign(ranked.ordering.begin(), ranked.ordering.begin() + static_cast<std::ptrdiff_t>(r));
  s.prompt_sources.assign(ranked.ordering.begin() + static_cast<std::ptrdiff_t>(r),
                          ranked.ordering.begin() + static_cast<std::ptrdiff_t>(r + p));
  s.discarded.assign(ranked.ordering.begin() + static_cast<std::ptrdiff_t>(r + p), ranked.ordering.end());
  return s;
}

}  // namespace edgereplay::memory
