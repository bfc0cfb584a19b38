#include "edgereplay/harness/phase_plan.hpp"

#include <numeric>

#include "edgereplay/common/error.hpp"
#include "edgereplay/common/rng.hpp"

namespace edgereplay::harness {

Protocol parse_protocol(std::string_view name) {
  if (name == "LFH" || name == "lfh") return Protocol::lfh;
  if (name == "LFS" || name == "lfs") return Protocol::lfs;
  throw ValidationError("unknown protocol: " + std::string(name));
}

std::string_view protocol_name(Protocol p) { return p == Protocol::lfh ? "LFH" : "LFS"; }

std::vector<std::size_t> PhasePlan::sizes() const {
  std::vector<std::size_t> out;
  for (const auto& c : classes_per_phase) out.push_back(c.size());
  return out;
}

std::vector<int> split_evenly(int count, int groups) {
  std::vector<int> sizes(static_cast<std::size_t>(groups), count / groups);
  for (int i = 0; i < count % groups; ++i) ++sizes[static_cast<std::size_t>(i)];
  return sizes;
}

PhasePlan make_phase_plan(int num_classes, int n, Protocol protocol, std::uint64_t seed) {
  if (n < 1) throw ValidationError("phase count N must be >= 1");
  std::vector<int> sizes;
  if (protocol == Protocol::lfs) {
    if (num_classes < n) throw ValidationError("LFS needs at least N classes");
    sizes = split_evenly(num_classes, n);
  } else {
    if (num_classes < 2) throw ValidationError("LFH needs at least 2 classes");
    const int first = (num_classes + 1) / 2;
    const int rest = num_classes - first;
    if (rest < n) throw ValidationError("LFH: " + std::to_string(rest) + " remaining classes cannot fill N = " +
                                        std::to_string(n) + " phases");
    sizes.push_back(first);
    for (int s : split_evenly(rest, n)) sizes.push_back(s);
  }

  std::vector<int> order(static_cast<std::size_t>(num_classes));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "class-order"));
  rng.shuffle(std::span(order));

  PhasePlan plan;
  plan.protocol = protocol;
  plan.n = n;
  std::size_t at = 0;
  for (int s : sizes) {
    plan.classes_per_phase.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(at),
                                        order.begin() + static_cast<std::ptrdiff_t>(at + static_cast<std::size_t>(s)));
    at += static_cast<std::size_t>(s);
  }
  return plan;
}

}  // namespace edgereplay::harness
