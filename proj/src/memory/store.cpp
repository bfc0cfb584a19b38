#include "edgereplay/memory/store.hpp"

#include <cctype>
#include <cstdio>

#include "edgereplay/common/digest.hpp"
#include "edgereplay/common/error.hpp"
#include "edgereplay/common/fs.hpp"
#include "edgereplay/imaging/ebm.hpp"
#include "edgereplay/imaging/png_io.hpp"

namespace edgereplay::memory {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string blob_name(std::size_t index, const std::string& source_id, const char* ext) {
  std::string safe;
  for (char c : source_id) safe.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "%04zu_", index);
  return prefix + safe + ext;
}

json ledger_json(const MemoryLedger& l) {
  return {{"units_per_class", l.units_per_class}, {"alpha", l.alpha},           {"capacity_per_unit", l.capacity_per_unit},
          {"compressed_units", l.compressed_units}, {"real_slots", l.real_slots}, {"prompt_slots", l.prompt_slots}};
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw StoreCorruption(std::string("manifest: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw StoreCorruption(std::string("manifest: bad type for '") + key + "'");
  }
}

std::vector<std::uint8_t> read_verified(const fs::path& root, const json& entry) {
  const auto rel = field<std::string>(entry, "path");
  if (rel.find("..") != std::string::npos || fs::path(rel).is_absolute())
    throw StoreCorruption("manifest: path escapes store root: " + rel);
  const auto path = root / rel;
  if (!fs::exists(path)) throw StoreCorruption("missing blob " + rel);
  auto bytes = read_file(path);
  if (sha256_hex(bytes) != field<std::string>(entry, "sha256")) throw StoreCorruption("checksum mismatch for " + rel);
  return bytes;
}

}  // namespace

std::size_t ExemplarStore::real_count() const {
  std::size_t n = 0;
  for (const auto& [id, c] : classes_) n += c.real.size();
  return n;
}

std::size_t ExemplarStore::prompt_count() const {
  std::size_t n = 0;
  for (const auto& [id, c] : classes_) n += c.prompts.size();
  return n;
}

void ExemplarStore::add_class(int class_id, ClassExemplars exemplars) {
  if (classes_.contains(class_id)) throw ValidationError("class " + std::to_string(class_id) + " already stored");
  if (exemplars.real.size() > static_cast<std::size_t>(ledger_.real_slots))
    throw ValidationError("class " + std::to_string(class_id) + ": more real exemplars than R");
  if (exemplars.prompts.size() > static_cast<std::size_t>(ledger_.prompt_slots))
    throw ValidationError("class " + std::to_string(class_id) + ": more prompts than S");
  for (const auto& r : exemplars.real)
    if (r.class_id != class_id) throw ValidationError("real exemplar labelled with another class");
  for (const auto& p : exemplars.prompts)
    if (p.class_id != class_id) throw ValidationError("prompt labelled with another class");
  classes_.emplace(class_id, std::move(exemplars));
}

std::size_t prompt_payload_bytes(const ClassExemplars& exemplars) {
  std::size_t n = 0;
  for (const auto& p : exemplars.prompts) n += imaging::ebm_payload_bytes(p.visual.edges);
  return n;
}

json store_save(const ExemplarStore& store, const fs::path& root) {
  if (!is_fresh_output(root)) throw ValidationError("store output " + root.string() + " exists and is not empty");
  fs::create_directories(root);

  json classes = json::array();
  for (const auto& [class_id, ex] : store.classes()) {
    json entries = json::array();
    const auto dir = std::to_string(class_id);
    for (std::size_t i = 0; i < ex.real.size(); ++i) {
      const auto& r = ex.real[i];
      const auto rel = "real/" + dir + "/" + blob_name(i, r.source_id, ".png");
      const auto bytes = imaging::encode_png(r.image);
      write_file_atomic(root / rel, bytes);
      entries.push_back({{"kind", "real"}, {"path", rel}, {"class_id", class_id},
                         {"source_id", r.source_id}, {"sha256", sha256_hex(bytes)}});
    }
    for (std::size_t i = 0; i < ex.prompts.size(); ++i) {
      const auto& p = ex.prompts[i];
      const auto rel = "prompts/" + dir + "/" + blob_name(i, p.source_id, ".ebm");
      const auto bytes = imaging::encode_ebm(p.visual.edges, p.visual.orig_h, p.visual.orig_w);
      write_file_atomic(root / rel, bytes);
      entries.push_back({{"kind", "prompt"},
                         {"path", rel},
                         {"class_id", class_id},
                         {"source_id", p.source_id},
                         {"sha256", sha256_hex(bytes)},
                         {"text", p.textual.text()},
                         {"scheme", std::string(prompts::scheme_name(p.visual.scheme))}});
    }
    classes.push_back({{"class_id", class_id}, {"entries", std::move(entries)}});
  }

  json manifest = {{"store_version", kStoreVersion}, {"ledger", ledger_json(store.ledger())}, {"classes", std::move(classes)}};
  write_file_atomic(root / "manifest.json", manifest.dump(2) + "\n");
  return manifest;
}

ExemplarStore store_load(const fs::path& root) {
  const auto manifest_path = root / "manifest.json";
  if (!fs::exists(manifest_path)) throw StoreCorruption("no manifest.json under " + root.string());
  json manifest;
  try {
    const auto bytes = read_file(manifest_path);
    manifest = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw StoreCorruption(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (field<int>(manifest, "store_version") != kStoreVersion) throw StoreCorruption("unsupported store_version");

  const auto& lj = manifest.at("ledger");
  MemoryLedger ledger;
  try {
    ledger = allocate(field<int>(lj, "units_per_class"), field<double>(lj, "alpha"), field<double>(lj, "capacity_per_unit"));
  } catch (const ValidationError& e) {
    throw StoreCorruption(std::string("manifest ledger invalid: ") + e.what());
  }
  if (ledger.compressed_units != field<int>(lj, "compressed_units") || ledger.real_slots != field<int>(lj, "real_slots") ||
      ledger.prompt_slots != field<int>(lj, "prompt_slots"))
    throw StoreCorruption("manifest ledger is inconsistent with its own b / alpha / capacity");

  ExemplarStore store(ledger);
  const auto classes = manifest.contains("classes") ? manifest.at("classes") : json::array();
  for (const auto& cj : classes) {
    const int class_id = field<int>(cj, "class_id");
    ClassExemplars ex;
    for (const auto& e : field<json>(cj, "entries")) {
      if (field<int>(e, "class_id") != class_id) throw StoreCorruption("entry filed under the wrong class");
      const auto kind = field<std::string>(e, "kind");
      const auto bytes = read_verified(root, e);
      try {
        if (kind == "real") {
          ex.real.push_back({class_id, field<std::string>(e, "source_id"), imaging::decode_png(bytes)});
        } else if (kind == "prompt") {
          auto decoded = imaging::decode_ebm(bytes);
          prompts::PromptRecord rec;
          rec.visual = {std::move(decoded.edges), decoded.orig_h, decoded.orig_w,
                        prompts::parse_scheme(field<std::string>(e, "scheme"))};
          rec.textual = prompts::TextualPrompt(field<std::string>(e, "text"));
          rec.class_id = class_id;
          rec.source_id = field<std::string>(e, "source_id");
          ex.prompts.push_back(std::move(rec));
        } else {
          throw StoreCorruption("unknown entry kind '" + kind + "'");
        }
      } catch (const DecodeError& err) {
        throw StoreCorruption(std::string("undecodable blob: ") + err.what());
      } catch (const ValidationError& err) {
        throw StoreCorruption(std::string("invalid entry: ") + err.what());
      }
    }
    try {
      store.add_class(class_id, std::move(ex));
    } catch (const ValidationError& err) {
      throw StoreCorruption(std::string("manifest/ledger inconsistency: ") + err.what());
    }
  }
  return store;
}

}  // namespace edgereplay::memory
