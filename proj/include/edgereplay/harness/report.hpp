#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "edgereplay/harness/config.hpp"
#include "edgereplay/harness/experiment.hpp"

namespace edgereplay::harness {

nlohmann::json metrics_json(const Metrics& m);
// Config echo plus metrics.
nlohmann::json report_json(const ExperimentConfig& cfg, const Metrics& m);
std::string metrics_table(const Metrics& m);
// phase,seen_classes,accuracy
std::string metrics_csv(const Metrics& m);

// Writes report.json, report.txt and accuracy.csv into dir.
void write_report(const std::filesystem::path& dir, const ExperimentConfig& cfg, const Metrics& m);

}  // namespace edgereplay::harness
