#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "edgereplay/imaging/canny.hpp"
#include "edgereplay/prompts/dims.hpp"
#include "edgereplay/prompts/visual.hpp"
#include "edgereplay/regen/backend.hpp"
#include "edgereplay/harness/phase_plan.hpp"

namespace edgereplay::harness {

struct TrainConfig {
  double p = 0.0;  // augmentation probability
  int copies = 0;  // K
  double alpha = 0.0;
  int units_per_class = 4;  // b
  double capacity = 0.0;    // edge maps per unit; 0 derives it from the data
  bool augment_exemplars = true;
  int epochs_first = 30;
  int epochs_later = 30;
  double learning_rate = 0.05;
  int batch_size = 32;
  std::uint64_t experiment_seed = 0;
};

struct ExperimentConfig {
  Protocol protocol = Protocol::lfh;
  int phases = 4;      // N
  int classes = 10;    // C
  int per_class = 60;  // images generated per class before the train/test split
  int image_size = 64;
  std::uint64_t dataset_seed = 0;
  TrainConfig train;
  prompts::GammaPolicy gamma = prompts::GammaPolicy::fixed_at(64);
  prompts::ResizeScheme scheme = prompts::ResizeScheme::edge_first;
  imaging::CannyParams canny;
  regen::BackendDescriptor backend;
  int threads = 1;

  // Throws ValidationError naming the first offending field.
  void validate() const;
};

// Keys mirror the field names with N, C, b, K and alpha spelled as such.
// Unknown keys are rejected. Missing keys keep their defaults.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

}  // namespace edgereplay::harness
