#include "edgereplay/harness/config.hpp"

#include <cmath>
#include <set>

#include "edgereplay/common/error.hpp"
#include "edgereplay/common/fs.hpp"

namespace edgereplay::harness {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw ValidationError("config field '" + field + "': " + why);
}

void reject_unknown(const json& j, const std::string& where, const std::set<std::string>& known) {
  if (!j.is_object()) bad(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) bad(where.empty() ? key : where + "." + key, "unknown key");
}

template <typename T>
void read(const json& j, const char* key, const std::string& prefix, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  const std::string name = prefix.empty() ? key : prefix + "." + key;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) bad(name, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer()) bad(name, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (!it->is_number_unsigned()) bad(name, "must be >= 0");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) bad(name, "expected a number");
    } else {
      if (!it->is_string()) bad(name, "expected a string");
    }
    out = it->template get<T>();
  } catch (const json::exception& e) {
    bad(name, e.what());
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (classes < 2) bad("C", "need at least 2 classes");
  if (phases < 1) bad("N", "must be >= 1");
  if (protocol == Protocol::lfs && phases > classes) bad("N", "LFS needs N <= C");
  if (protocol == Protocol::lfh && phases > classes - (classes + 1) / 2) bad("N", "LFH needs N <= C - ceil(C/2)");
  if (per_class < 2) bad("per_class", "need at least 2 images per class (train and test)");
  if (image_size < 16) bad("image_size", "must be >= 16");
  if (train.units_per_class < 1) bad("b", "must be >= 1");
  if (!(train.alpha >= 0.0 && train.alpha <= 1.0)) bad("alpha", "must lie in [0, 1]");
  if (!(train.p >= 0.0 && train.p <= 1.0)) bad("p", "must lie in [0, 1]");
  if (train.copies < 0) bad("K", "must be >= 0");
  if (train.p > 0.0 && train.copies == 0) bad("K", "p > 0 needs K >= 1");
  if (std::lround(train.alpha * train.units_per_class) > 0 && train.copies == 0)
    bad("K", "alpha > 0 stores prompts that need K >= 1 copies to replay");
  if (train.capacity != 0.0 && !(train.capacity >= 1.0 && std::isfinite(train.capacity)))
    bad("capacity", "must be 0 (derive) or >= 1");
  if (train.epochs_first < 1) bad("epochs_first", "must be >= 1");
  if (train.epochs_later < 1) bad("epochs_later", "must be >= 1");
  if (!(train.learning_rate >= 0.0 && std::isfinite(train.learning_rate))) bad("learning_rate", "must be >= 0");
  if (train.batch_size < 1) bad("batch_size", "must be >= 1");
  if (!(canny.low >= 0.0 && canny.low <= canny.high)) bad("canny", "need 0 <= low <= high");
  if (!(canny.sigma > 0.0)) bad("canny.sigma", "must be > 0");
  if (backend.kind == regen::BackendDescriptor::Kind::remote && backend.endpoint.empty())
    bad("backend.endpoint", "required for a remote backend");
  if (!(backend.timeout_seconds > 0.0)) bad("backend.timeout_seconds", "must be > 0");
  if (backend.max_in_flight < 1) bad("backend.max_in_flight", "must be >= 1");
  if (threads < 1) bad("threads", "must be >= 1");
}

ExperimentConfig parse_config(const json& j) {
  reject_unknown(j, "",
                 {"protocol", "N", "C", "per_class", "image_size", "dataset_seed", "experiment_seed", "b", "alpha",
                  "capacity", "p", "K", "augment_exemplars", "epochs_first", "epochs_later", "learning_rate",
                  "batch_size", "gamma_policy", "scheme", "canny", "backend", "threads"});
  ExperimentConfig cfg;
  std::string text;

  if (j.contains("protocol")) {
    read(j, "protocol", "", text);
    try {
      cfg.protocol = parse_protocol(text);
    } catch (const ValidationError& e) {
      bad("protocol", e.what());
    }
  }
  read(j, "N", "", cfg.phases);
  read(j, "C", "", cfg.classes);
  read(j, "per_class", "", cfg.per_class);
  read(j, "image_size", "", cfg.image_size);
  read(j, "dataset_seed", "", cfg.dataset_seed);
  read(j, "experiment_seed", "", cfg.train.experiment_seed);
  read(j, "b", "", cfg.train.units_per_class);
  read(j, "alpha", "", cfg.train.alpha);
  read(j, "capacity", "", cfg.train.capacity);
  read(j, "p", "", cfg.train.p);
  read(j, "K", "", cfg.train.copies);
  read(j, "augment_exemplars", "", cfg.train.augment_exemplars);
  read(j, "epochs_first", "", cfg.train.epochs_first);
  read(j, "epochs_later", "", cfg.train.epochs_later);
  read(j, "learning_rate", "", cfg.train.learning_rate);
  read(j, "batch_size", "", cfg.train.batch_size);
  read(j, "threads", "", cfg.threads);
  if (j.contains("gamma_policy")) {
    read(j, "gamma_policy", "", text);
    try {
      cfg.gamma = prompts::GammaPolicy::parse(text);
    } catch (const ValidationError& e) {
      bad("gamma_policy", e.what());
    }
  }
  if (j.contains("scheme")) {
    read(j, "scheme", "", text);
    try {
      cfg.scheme = prompts::parse_scheme(text);
    } catch (const ValidationError& e) {
      bad("scheme", e.what());
    }
  }
  if (auto it = j.find("canny"); it != j.end()) {
    reject_unknown(*it, "canny", {"low", "high", "sigma"});
    read(*it, "low", "canny", cfg.canny.low);
    read(*it, "high", "canny", cfg.canny.high);
    read(*it, "sigma", "canny", cfg.canny.sigma);
  }
  if (auto it = j.find("backend"); it != j.end()) {
    reject_unknown(*it, "backend", {"kind", "endpoint", "timeout_seconds", "max_in_flight"});
    if (it->contains("kind")) {
      read(*it, "kind", "backend", text);
      if (text == "stub") cfg.backend.kind = regen::BackendDescriptor::Kind::stub;
      else if (text == "remote") cfg.backend.kind = regen::BackendDescriptor::Kind::remote;
      else bad("backend.kind", "expected \"stub\" or \"remote\"");
    }
    read(*it, "endpoint", "backend", cfg.backend.endpoint);
    read(*it, "timeout_seconds", "backend", cfg.backend.timeout_seconds);
    read(*it, "max_in_flight", "backend", cfg.backend.max_in_flight);
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    const auto bytes = read_file(path);
    text.assign(bytes.begin(), bytes.end());
  } catch (const Error& e) {
    throw ValidationError("cannot read config " + path.string() + ": " + e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["protocol"] = std::string(protocol_name(cfg.protocol));
  j["N"] = cfg.phases;
  j["C"] = cfg.classes;
  j["per_class"] = cfg.per_class;
  j["image_size"] = cfg.image_size;
  j["dataset_seed"] = cfg.dataset_seed;
  j["experiment_seed"] = cfg.train.experiment_seed;
  j["b"] = cfg.train.units_per_class;
  j["alpha"] = cfg.train.alpha;
  j["capacity"] = cfg.train.capacity;
  j["p"] = cfg.train.p;
  j["K"] = cfg.train.copies;
  j["augment_exemplars"] = cfg.train.augment_exemplars;
  j["epochs_first"] = cfg.train.epochs_first;
  j["epochs_later"] = cfg.train.epochs_later;
  j["learning_rate"] = cfg.train.learning_rate;
  j["batch_size"] = cfg.train.batch_size;
  j["gamma_policy"] = cfg.gamma.name();
  j["scheme"] = std::string(prompts::scheme_name(cfg.scheme));
  j["canny"] = {{"low", cfg.canny.low}, {"high", cfg.canny.high}, {"sigma", cfg.canny.sigma}};
  j["backend"] = {{"kind", cfg.backend.kind == regen::BackendDescriptor::Kind::stub ? "stub" : "remote"},
                  {"endpoint", cfg.backend.endpoint},
                  {"timeout_seconds", cfg.backend.timeout_seconds},
                  {"max_in_flight", cfg.backend.max_in_flight}};
  j["threads"] = cfg.threads;
  return j;
}

}  // namespace edgereplay::harness
