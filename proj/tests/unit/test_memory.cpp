#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "corpus.hpp"
#include "edgereplay/common/error.hpp"
#include "edgereplay/common/fs.hpp"
#include "edgereplay/common/rng.hpp"
#include "edgereplay/memory/herding.hpp"
#include "edgereplay/memory/ledger.hpp"
#include "edgereplay/memory/store.hpp"
#include "oracles.hpp"

using namespace edgereplay;
using namespace edgereplay::memory;

TEST_CASE("allocation reproduces the published table") {
  struct Row {
    int b;
    double alpha, cap;
    int r, s;
  };
  const Row rows[] = {{5, 0.0, 18.838, 5, 0},  {5, 0.2, 18.838, 4, 18}, {5, 0.4, 18.838, 3, 37},
                      {20, 0.05, 24, 19, 24}, {20, 0.1, 24, 18, 48},    {20, 0.15, 24, 17, 72}};
  for (const auto& row : rows) {
    CAPTURE(row.b);
    CAPTURE(row.alpha);
    const auto l = allocate(row.b, row.alpha, row.cap);
    CHECK(l.real_slots == row.r);
    CHECK(l.prompt_slots == row.s);
    CHECK(l.effective_alpha() == doctest::Approx(row.alpha));
  }
  CHECK(allocate(5, 1.0, 24).real_slots == 0);
  CHECK(allocate(5, 1.0, 24).prompt_slots == 120);
  CHECK(allocate(5, 1.0, 19.2).prompt_slots == 96);
}

TEST_CASE("allocation rejects bad inputs") {
  CHECK_THROWS_AS(allocate(0, 0.2, 24), ValidationError);
  CHECK_THROWS_AS(allocate(5, -0.1, 24), ValidationError);
  CHECK_THROWS_AS(allocate(5, 1.1, 24), ValidationError);
  CHECK_THROWS_AS(allocate(5, 0.2, 0.5), ValidationError);
}

TEST_CASE("exemplar selection splits the ranking") {
  HerdingRank rank{3, {4, 2, 0, 1, 3}};
  const auto l = allocate(2, 0.5, 2.0);  // R = 1, S = 2
  const auto s = select_exemplars(rank, l);
  CHECK(s.real == std::vector<std::size_t>{4});
  CHECK(s.prompt_sources == std::vector<std::size_t>{2, 0});
  CHECK(s.discarded == std::vector<std::size_t>{1, 3});
  HerdingRank tiny{0, {1}};
  const auto t = select_exemplars(tiny, allocate(4, 0.5, 24));
  CHECK(t.real.size() == 1);
  CHECK(t.prompt_sources.empty());
}

TEST_CASE("herding on a hand-checked instance") {
  // Normalised mean is (0.675, 0.098); (2, 0.2) normalises to (0.995, 0.0995),
  // squared distance 0.102 against 0.115 for (1, 0).
  const std::vector<FeatureVector> f{{0, 1}, {1, 0}, {1, -1}, {2, 0.2}};
  const auto r = herding_order(f, 9);
  CHECK(r.class_id == 9);
  CHECK(r.ordering.front() == 3);
  auto sorted = r.ordering;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::size_t>{0, 1, 2, 3});
  // Ties go to the lowest index.
  const std::vector<FeatureVector> same{{1, 1}, {1, 1}, {1, 1}};
  CHECK(herding_order(same).ordering == std::vector<std::size_t>{0, 1, 2});
  CHECK_THROWS_AS(herding_order(std::vector<FeatureVector>{}), ValidationError);
  CHECK_THROWS_AS(herding_order(std::vector<FeatureVector>{{1, 2}, {1}}), ValidationError);
}

TEST_CASE("herding matches the brute-force oracle") {
  Rng rng(5);
  for (int inst = 0; inst < 300; ++inst) {
    const int n = 1 + int(rng.below(12)), d = 1 + int(rng.below(6));
    std::vector<FeatureVector> f(n, FeatureVector(d));
    for (auto& v : f)
      for (auto& x : v) x = rng.normal();
    CHECK(herding_order(f).ordering == oracle::brute_herding(f));
  }
}

namespace {

ExemplarStore sample_store() {
  ExemplarStore store(allocate(2, 0.5, 24));
  for (int c : {0, 3}) {
    ClassExemplars ex;
    imaging::RgbImage img(6, 9, std::uint8_t(40 + c));
    img.set(1, 2, 200, 10, 30);
    ex.real.push_back({c, "src_" + std::to_string(c), img});
    for (int k = 0; k < 3; ++k) {
      prompts::PromptRecord p;
      p.visual.edges = imaging::BitEdgeMap(64, 128);
      p.visual.edges.set(k, 3 + c);
      p.visual.orig_h = 30;
      p.visual.orig_w = 61;
      p.textual = prompts::TextualPrompt("red square");
      p.class_id = c;
      p.source_id = "p" + std::to_string(c) + "_" + std::to_string(k);
      ex.prompts.push_back(p);
    }
    store.add_class(c, ex);
  }
  return store;
}

}  // namespace

TEST_CASE("store round trips and is byte-stable") {
  testkit::TempDir dir;
  const auto store = sample_store();
  CHECK(store.real_count() == 2);
  CHECK(store.prompt_count() == 6);
  store_save(store, dir / "a");
  store_save(store, dir / "b");
  CHECK(testkit::tree_bytes(dir / "a") == testkit::tree_bytes(dir / "b"));
  CHECK(store_load(dir / "a") == store);
  CHECK(prompt_payload_bytes(store.classes().at(0)) == 3 * 64 * 16);
  CHECK_THROWS_AS(store_save(store, dir / "a"), ValidationError);
}

TEST_CASE("store enforces the ledger") {
  ExemplarStore store(allocate(2, 0.5, 1.0));  // R = 1, S = 1
  ClassExemplars two_real;
  two_real.real.resize(2);
  CHECK_THROWS_AS(store.add_class(0, two_real), ValidationError);
  ClassExemplars wrong;
  wrong.real.push_back({5, "x", imaging::RgbImage(1, 1)});
  CHECK_THROWS_AS(store.add_class(0, wrong), ValidationError);
  ClassExemplars ok;
  ok.real.push_back({0, "x", imaging::RgbImage(1, 1)});
  store.add_class(0, ok);
  CHECK_THROWS_AS(store.add_class(0, ok), ValidationError);
}

TEST_CASE("store load detects corruption") {
  testkit::TempDir dir;
  const auto store = sample_store();

  store_save(store, dir / "flip");
  {
    const auto p = dir / "flip" / "prompts" / "0" / "0001_p0_1.ebm";
    REQUIRE(std::filesystem::exists(p));
    auto bytes = read_file(p);
    bytes.back() ^= 0x80;
    write_file_atomic(p, bytes);
  }
  CHECK_THROWS_AS(store_load(dir / "flip"), StoreCorruption);

  store_save(store, dir / "gone");
  std::filesystem::remove(dir / "gone" / "real" / "3" / "0000_src_3.png");
  CHECK_THROWS_AS(store_load(dir / "gone"), StoreCorruption);

  store_save(store, dir / "ledger");
  {
    auto bytes = read_file(dir / "ledger" / "manifest.json");
    auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
    j["ledger"]["prompt_slots"] = 999;
    write_file_atomic(dir / "ledger" / "manifest.json", j.dump(2));
  }
  CHECK_THROWS_AS(store_load(dir / "ledger"), StoreCorruption);

  store_save(store, dir / "escape");
  {
    auto bytes = read_file(dir / "escape" / "manifest.json");
    auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
    j["classes"][0]["entries"][0]["path"] = "../../etc/passwd";
    write_file_atomic(dir / "escape" / "manifest.json", j.dump(2));
  }
  CHECK_THROWS_AS(store_load(dir / "escape"), StoreCorruption);

  std::filesystem::create_directories(dir / "empty");
  CHECK_THROWS_AS(store_load(dir / "empty"), StoreCorruption);
  write_file_atomic(dir / "empty" / "manifest.json", std::string_view("{not json"));
  CHECK_THROWS_AS(store_load(dir / "empty"), StoreCorruption);
}
