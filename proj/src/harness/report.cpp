#include "edgereplay/harness/report.hpp"

#include <cstdio>

#include "edgereplay/common/fs.hpp"

namespace edgereplay::harness {

using nlohmann::json;

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

json metrics_json(const Metrics& m) {
  json j;
  j["per_phase"] = m.per_phase();
  j["average"] = m.average();
  j["last"] = m.last();
  j["ledger"] = {{"b", m.ledger.units_per_class},
                 {"alpha", m.ledger.alpha},
                 {"capacity_per_unit", m.ledger.capacity_per_unit},
                 {"compressed_units", m.ledger.compressed_units},
                 {"R", m.ledger.real_slots},
                 {"S", m.ledger.prompt_slots}};
  j["phases"] = json::array();
  for (const auto& p : m.phases)
    j["phases"].push_back({{"phase", p.phase},
                           {"new_classes", p.new_classes},
                           {"seen_classes", p.seen_classes},
                           {"accuracy", p.accuracy},
                           {"stream_size", p.stream_size},
                           {"real_exemplars", p.real_exemplars},
                           {"prompt_exemplars", p.prompt_exemplars}});
  return j;
}

json report_json(const ExperimentConfig& cfg, const Metrics& m) {
  json j = metrics_json(m);
  j["config"] = to_json(cfg);
  return j;
}

std::string metrics_table(const Metrics& m) {
  std::string out = "phase  classes  stream  real  prompts  accuracy\n";
  for (const auto& p : m.phases) {
    char line[128];
    std::snprintf(line, sizeof line, "%5d  %7d  %6zu  %4zu  %7zu  %8s\n", p.phase, p.seen_classes, p.stream_size,
                  p.real_exemplars, p.prompt_exemplars, fixed(100.0 * p.accuracy, 2).c_str());
    out += line;
  }
  out += "average " + fixed(100.0 * m.average(), 2) + "  last " + fixed(100.0 * m.last(), 2) + "\n";
  out += "ledger b=" + std::to_string(m.ledger.units_per_class) + " R=" + std::to_string(m.ledger.real_slots) +
         " S=" + std::to_string(m.ledger.prompt_slots) + " capacity=" + fixed(m.ledger.capacity_per_unit, 3) + "\n";
  return out;
}

std::string metrics_csv(const Metrics& m) {
  std::string out = "phase,seen_classes,accuracy\n";
  for (const auto& p : m.phases)
    out += std::to_string(p.phase) + "," + std::to_string(p.seen_classes) + "," + fixed(p.accuracy, 6) + "\n";
  return out;
}

void write_report(const std::filesystem::path& dir, const ExperimentConfig& cfg, const Metrics& m) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "report.json", report_json(cfg, m).dump(2) + "\n");
  write_file_atomic(dir / "report.txt", metrics_table(m));
  write_file_atomic(dir / "accuracy.csv", metrics_csv(m));
}

}  // namespace edgereplay::harness
