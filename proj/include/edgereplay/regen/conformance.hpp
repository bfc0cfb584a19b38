#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "edgereplay/imaging/image.hpp"

namespace edgereplay::regen {

struct ConformanceResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Edge map described by a corpus entry: {"shape": ring|disk|blank|diagonal,
// "height": H, "width": W}.
imaging::BitEdgeMap corpus_edges(const nlohmann::json& spec);

// Runs every case of a conformance corpus (tests/conformance/corpus.json)
// against a live service. Never throws for a misbehaving service; failures are
// reported per case.
std::vector<ConformanceResult> run_conformance(const std::string& endpoint, const nlohmann::json& corpus);

}  // namespace edgereplay::regen
