#include "edgereplay/harness/sampling.hpp"

#include <string>

#include "edgereplay/common/error.hpp"

namespace edgereplay::harness {

namespace {

bool replaceable(const PoolItem& item, const SamplingParams& params) {
  if (params.p <= 0.0) return false;
  return item.kind == PoolItem::Kind::new_real ||
         (item.kind == PoolItem::Kind::exemplar_real && params.augment_exemplars);
}

}  // namespace

void validate_pool(std::span<const PoolItem> pool, const SamplingParams& params) {
  if (!(params.p >= 0.0 && params.p <= 1.0)) throw ValidationError("augmentation probability p must lie in [0, 1]");
  if (params.copies < 0) throw ValidationError("copies per image K must be >= 0");
  if (params.p > 0.0 && params.copies == 0) throw ValidationError("p > 0 needs K >= 1 generated copies to sample from");
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& item = pool[i];
    if (item.kind == PoolItem::Kind::prompt && item.copies.empty())
      throw ValidationError("prompt item " + std::to_string(i) + " has no generated copies");
    if (replaceable(item, params) && item.copies.size() != static_cast<std::size_t>(params.copies))
      throw ValidationError("real item " + std::to_string(i) + " has " + std::to_string(item.copies.size()) +
                            " copies, expected K = " + std::to_string(params.copies));
  }
}

std::vector<EpochEntry> epoch_view(std::span<const PoolItem> pool, const SamplingParams& params, Rng& rng) {
  validate_pool(pool, params);
  std::vector<EpochEntry> out;
  out.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto& item = pool[i];
    EpochEntry e;
    e.item = i;
    e.class_id = item.class_id;
    if (item.kind == PoolItem::Kind::prompt) {
      e.copy = static_cast<int>(rng.below(item.copies.size()));
      e.feature = item.copies[static_cast<std::size_t>(e.copy)];
    } else if (replaceable(item, params) && rng.bernoulli(params.p)) {
      e.copy = static_cast<int>(rng.below(item.copies.size()));
      e.feature = item.copies[static_cast<std::size_t>(e.copy)];
    } else {
      e.feature = item.real;
    }
    out.push_back(e);
  }
  rng.shuffle(std::span(out));
  return out;
}

}  // namespace edgereplay::harness
