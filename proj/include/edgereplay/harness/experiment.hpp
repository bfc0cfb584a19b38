#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgereplay/harness/classifier.hpp"
#include "edgereplay/harness/config.hpp"
#include "edgereplay/harness/dataset.hpp"
#include "edgereplay/harness/phase_plan.hpp"
#include "edgereplay/memory/ledger.hpp"
#include "edgereplay/regen/backend.hpp"

namespace edgereplay::harness {

struct PhaseRecord {
  int phase = 0;
  std::vector<int> new_classes;
  int seen_classes = 0;
  double accuracy = 0.0;
  std::size_t stream_size = 0;  // samples per training epoch
  std::size_t real_exemplars = 0;
  std::size_t prompt_exemplars = 0;
  friend bool operator==(const PhaseRecord&, const PhaseRecord&) = default;
};

struct Metrics {
  std::vector<PhaseRecord> phases;
  memory::MemoryLedger ledger;

  std::vector<double> per_phase() const;
  double average() const;  // mean of per_phase
  double last() const;
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

// Counters that depend on what was already on disk, kept out of Metrics so
// that a resumed or cache-warm run reports the same metrics.
struct RunStats {
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  int resumed_phases = 0;
};

using Logger = std::function<void(std::string_view)>;
// Sees the training stream of every epoch, after shuffling.
using EpochObserver = std::function<void(int phase, int epoch, std::span<const Example> stream)>;

// Seed of the sampling stream for one epoch of one phase.
std::uint64_t epoch_seed(std::uint64_t experiment_seed, int phase, int epoch);
// Base seed the K copies of every image are derived from.
std::uint64_t copies_seed(std::uint64_t experiment_seed);
// Capacity from the config, or 24 / mean area ratio over the training images.
double resolve_capacity(const ExperimentConfig& cfg, const Dataset& dataset);

// The class order and procedural dataset a config describes.
PhasePlan plan_for(const ExperimentConfig& cfg);
Dataset dataset_for(const ExperimentConfig& cfg);

// Runs every phase of the plan. Under work_dir:
//   cache/                generated images
//   store/phase_<i>/      exemplar store after phase i
//   checkpoint/phase_<i>.json  classifier and metrics after phase i
// A work_dir holding checkpoints of the same config resumes after the last
// one. Backend failures propagate with earlier phases left on disk.
Metrics run_experiment(const ExperimentConfig& cfg, const PhasePlan& plan, const Dataset& dataset,
                       regen::GenerationBackend& backend, const std::filesystem::path& work_dir,
                       RunStats* stats = nullptr, const Logger& log = {}, const EpochObserver& observe = {});

}  // namespace edgereplay::harness
