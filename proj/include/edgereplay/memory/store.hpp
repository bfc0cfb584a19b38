#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgereplay/imaging/image.hpp"
#include "edgereplay/memory/ledger.hpp"
#include "edgereplay/prompts/visual.hpp"

namespace edgereplay::memory {

inline constexpr int kStoreVersion = 1;

struct RealExemplar {
  int class_id = 0;
  std::string source_id;
  imaging::RgbImage image;

  friend bool operator==(const RealExemplar&, const RealExemplar&) = default;
};

struct ClassExemplars {
  std::vector<RealExemplar> real;
  std::vector<prompts::PromptRecord> prompts;

  friend bool operator==(const ClassExemplars&, const ClassExemplars&) = default;
};

// Real exemplars E and prompt records P for every class seen so far. Classes
// are added once and never modified afterwards.
class ExemplarStore {
 public:
  ExemplarStore() = default;
  explicit ExemplarStore(MemoryLedger ledger) : ledger_(ledger) {}

  const MemoryLedger& ledger() const noexcept { return ledger_; }
  const std::map<int, ClassExemplars>& classes() const noexcept { return classes_; }
  bool has_class(int class_id) const { return classes_.contains(class_id); }
  std::size_t real_count() const;
  std::size_t prompt_count() const;

  // Throws ValidationError if the class exists, an entry names another class,
  // or the counts exceed the ledger's R / S.
  void add_class(int class_id, ClassExemplars exemplars);

  friend bool operator==(const ExemplarStore&, const ExemplarStore&) = default;

 private:
  MemoryLedger ledger_;
  std::map<int, ClassExemplars> classes_;
};

// Directory layout under the store root:
//   manifest.json                       written last, atomically
//   real/<class_id>/<n>_<source>.png
//   prompts/<class_id>/<n>_<source>.ebm
// Every entry carries the SHA-256 of its blob. The root must be absent or an
// empty directory. Returns the manifest.
nlohmann::json store_save(const ExemplarStore& store, const std::filesystem::path& root);

// Throws StoreCorruption on missing files, checksum mismatches, undecodable
// blobs or a manifest that disagrees with its own ledger.
ExemplarStore store_load(const std::filesystem::path& root);

// Bytes of packed edge pixels held for one class (container headers excluded).
std::size_t prompt_payload_bytes(const ClassExemplars& exemplars);

}  // namespace edgereplay::memory
