#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace edgereplay::harness {

// LFH: half the classes (rounded up) in the first phase, the rest spread over
//      N further phases (N + 1 phases in total).
// LFS: the classes spread over N phases.
enum class Protocol { lfh, lfs };

Protocol parse_protocol(std::string_view name);
std::string_view protocol_name(Protocol p);

struct PhasePlan {
  Protocol protocol = Protocol::lfh;
  int n = 1;
  std::vector<std::vector<int>> classes_per_phase;

  std::size_t phases() const noexcept { return classes_per_phase.size(); }
  std::vector<std::size_t> sizes() const;
};

// Splits `count` items into `groups` sizes differing by at most one, larger first.
std::vector<int> split_evenly(int count, int groups);

// Class order is a seeded shuffle of 0..C-1. Throws ValidationError when a
// phase would be empty.
PhasePlan make_phase_plan(int num_classes, int n, Protocol protocol, std::uint64_t seed);

}  // namespace edgereplay::harness
