#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "corpus.hpp"
#include "edgereplay/common/digest.hpp"
#include "edgereplay/common/error.hpp"
#include "edgereplay/common/fs.hpp"
#include "edgereplay/imaging/canny.hpp"
#include "edgereplay/imaging/png_io.hpp"
#include "edgereplay/regen/backend.hpp"
#include "edgereplay/regen/cache.hpp"
#include "edgereplay/regen/conformance.hpp"
#include "edgereplay/regen/generator.hpp"
#include "edgereplay/regen/protocol.hpp"
#include "edgereplay/regen/remote_backend.hpp"
#include "edgereplay/regen/stub_backend.hpp"

using namespace edgereplay;
using namespace edgereplay::regen;
using nlohmann::json;

namespace {

imaging::BitEdgeMap ring(int h = 64, int w = 64) { return corpus_edges({{"shape", "ring"}, {"height", h}, {"width", w}}); }

prompts::PromptRecord record(const std::string& source, const std::string& text, int orig_h = 40, int orig_w = 50) {
  prompts::PromptRecord p;
  p.visual.edges = ring();
  p.visual.orig_h = orig_h;
  p.visual.orig_w = orig_w;
  p.textual = prompts::TextualPrompt(text);
  p.source_id = source;
  return p;
}

// Counts calls and can be told to fail or return the wrong size.
class ScriptedBackend final : public GenerationBackend {
 public:
  std::string identifier() const override { return "scripted"; }
  imaging::RgbImage generate_raw(const imaging::BitEdgeMap& edges, const std::string& text, std::uint64_t seed) override {
    ++calls;
    if (fail) throw BackendError(BackendError::Kind::server, "", "scripted failure");
    if (wrong_size) return imaging::RgbImage(edges.height() / 2, edges.width(), 9);
    return stub_generate(edges, text, seed);
  }
  int calls = 0;
  bool fail = false;
  bool wrong_size = false;
};

double mean_channel(const imaging::RgbImage& img, int c, int y0, int y1, int x0, int x1) {
  double s = 0;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) s += img.at(y, x, c);
  return s / ((y1 - y0) * (x1 - x0));
}

}  // namespace

TEST_CASE("cache keys depend on every input") {
  const auto e = ring();
  auto e2 = e;
  e2.set(0, 0, !e.get(0, 0));
  const auto k = cache_key(e, "apple pie", 3, "stub");
  CHECK(k.size() == 64);
  CHECK(k == cache_key(e, "apple pie", 3, "stub"));
  std::set<std::string> keys{k, cache_key(e2, "apple pie", 3, "stub"), cache_key(e, "apple pies", 3, "stub"),
                             cache_key(e, "apple pie", 4, "stub"), cache_key(e, "apple pie", 3, "stub2"),
                             cache_key(ring(64, 128), "apple pie", 3, "stub")};
  CHECK(keys.size() == 6);
  // Field boundaries are unambiguous.
  CHECK(cache_key(e, "a b", 1, "c") != cache_key(e, "a", 1, "b c"));
}

TEST_CASE("copy seeds are distinct per source and copy") {
  std::set<std::uint64_t> seeds;
  for (int k = 1; k <= 50; ++k) {
    seeds.insert(copy_seed(7, "img_a", k));
    seeds.insert(copy_seed(7, "img_b", k));
    seeds.insert(copy_seed(8, "img_a", k));
  }
  CHECK(seeds.size() == 150);
  CHECK(copy_seed(7, "img_a", 3) == copy_seed(7, "img_a", 3));
}

TEST_CASE("stub backend is deterministic and sensitive to its inputs") {
  StubBackend stub;
  const auto e = ring(64, 128);
  const auto a = stub.generate_raw(e, "electric guitar", 1);
  CHECK(a.height() == 64);
  CHECK(a.width() == 128);
  CHECK(a == stub.generate_raw(e, "electric guitar", 1));
  CHECK(a != stub.generate_raw(e, "electric guitar", 2));
  CHECK(a != stub.generate_raw(e, "apple pie", 1));
  CHECK(stub.identifier() == std::string(StubBackend::kIdentifier));
}

TEST_CASE("stub outputs vary with seed and text") {
  const auto e = ring();
  const char* texts[] = {"apple pie", "electric guitar", "train station platform", "red kite", "bicycle"};
  for (const char* t : texts) {
    CAPTURE(t);
    const auto a = stub_generate(e, t, 1);
    const auto b = stub_generate(e, t, 2);
    double mad = 0;
    for (std::size_t i = 0; i < a.pixels().size(); ++i) mad += std::abs(int(a.pixels()[i]) - int(b.pixels()[i]));
    CHECK(mad / static_cast<double>(a.pixels().size()) > 2.0);
  }
  auto mean_rgb = [](const imaging::RgbImage& img) {
    std::array<double, 3> m{};
    for (int c = 0; c < 3; ++c) m[c] = mean_channel(img, c, 0, img.height(), 0, img.width());
    return m;
  };
  for (std::uint64_t seed : {1, 7}) {
    const auto a = mean_rgb(stub_generate(e, "apple pie", seed));
    const auto b = mean_rgb(stub_generate(e, "electric guitar", seed));
    CHECK(std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]) > 8.0);
  }
}

TEST_CASE("stub round trip through edge extraction") {
  // No edges in, almost no edges out.
  const auto blank = corpus_edges({{"shape", "blank"}, {"height", 64}, {"width", 64}});
  const auto flat = imaging::canny_edges(stub_generate(blank, "apple pie", 7));
  CHECK(static_cast<double>(flat.count()) < 0.05 * 64 * 64);

  // A ring comes back within 2 px.
  for (int size : {64, 128}) {
    const auto e = ring(size, size);
    for (const char* t : {"apple pie", "blue boat", "train station platform"}) {
      for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto back = imaging::canny_edges(stub_generate(e, t, seed));
        std::size_t hit = 0, total = 0;
        for (int y = 0; y < size; ++y)
          for (int x = 0; x < size; ++x) {
            if (!e.get(y, x)) continue;
            ++total;
            bool found = false;
            for (int dy = -2; dy <= 2 && !found; ++dy)
              for (int dx = -2; dx <= 2 && !found; ++dx) {
                const int yy = y + dy, xx = x + dx;
                found = yy >= 0 && xx >= 0 && yy < size && xx < size && back.get(yy, xx);
              }
            hit += found;
          }
        CAPTURE(t);
        CAPTURE(seed);
        CHECK(static_cast<double>(hit) / static_cast<double>(total) >= 0.6);
      }
    }
  }
}

TEST_CASE("stub backend paints enclosed regions in the named colour") {
  const auto e = ring(128, 128);
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto red = stub_generate(e, "red bicycle", seed);
    const auto blue = stub_generate(e, "a blue bicycle", seed);
    // Centre of the ring is enclosed.
    CHECK(mean_channel(red, 0, 54, 74, 54, 74) > mean_channel(red, 2, 54, 74, 54, 74) + 60);
    CHECK(mean_channel(blue, 2, 54, 74, 54, 74) > mean_channel(blue, 0, 54, 74, 54, 74) + 60);
    // Corners touch the frame and stay neutral.
    for (const auto* img : {&red, &blue}) {
      const double r = mean_channel(*img, 0, 0, 8, 0, 8), g = mean_channel(*img, 1, 0, 8, 0, 8),
                   b = mean_channel(*img, 2, 0, 8, 0, 8);
      CHECK(std::max({r, g, b}) - std::min({r, g, b}) < 40);
    }
  }
}

TEST_CASE("cache stores, verifies and keeps the first write") {
  testkit::TempDir dir;
  GenerationCache cache(dir.path());
  const std::string key(64, 'a');
  CHECK_FALSE(cache.get(key).has_value());
  imaging::RgbImage img(5, 7, 33);
  img.set(2, 3, 1, 2, 3);
  cache.put(key, img);
  const auto got = cache.get(key);
  REQUIRE(got.has_value());
  CHECK(*got == img);

  cache.put(key, img);
  CHECK(cache.stats().conflicts == 0);
  cache.put(key, imaging::RgbImage(5, 7, 34));
  CHECK(cache.stats().conflicts == 1);
  CHECK(*cache.get(key) == img);

  // Flip a byte in the PNG; the entry is dropped and reads as a miss.
  const auto png = dir.path() / "aa" / (key + ".png");
  auto bytes = read_file(png);
  bytes[bytes.size() / 2] ^= 0x01;
  write_file_atomic(png, bytes);
  CHECK_FALSE(cache.get(key).has_value());
  CHECK(cache.stats().corrupt == 1);
  CHECK_FALSE(std::filesystem::exists(png));
  const auto s = cache.stats();
  CHECK(s.hits == 2);
  CHECK(s.misses == 2);
  CHECK(s.writes == 1);
}

TEST_CASE("generator resizes, caches and counts backend calls") {
  testkit::TempDir dir;
  ScriptedBackend backend;
  GenerationCache cache(dir.path());
  Generator gen(backend, &cache);
  GenerationRequest req{ring(), prompts::TextualPrompt("apple pie"), 5, 40, 50};
  const auto a = gen.generate(req);
  CHECK(a.height() == 40);
  CHECK(a.width() == 50);
  CHECK(gen.backend_calls() == 1);
  CHECK(gen.generate(req) == a);
  CHECK(gen.backend_calls() == 1);
  CHECK(backend.calls == 1);

  req.out_h = 64;
  req.out_w = 64;
  CHECK(gen.generate(req) == stub_generate(req.edges, "apple pie", 5));

  // Growing goes through Lanczos and still lands on the requested size.
  req.out_h = 100;
  req.out_w = 90;
  const auto big = gen.generate(req);
  CHECK(big.height() == 100);
  CHECK(big.width() == 90);
  CHECK(backend.calls == 1);

  // A fresh generator on the same cache never calls the backend.
  ScriptedBackend other;
  Generator again(other, &cache);
  CHECK(again.generate(req) == big);
  CHECK(other.calls == 0);

  GenerationRequest bad{imaging::BitEdgeMap(60, 64), prompts::TextualPrompt("apple pie"), 5, 40, 50};
  CHECK_THROWS_AS(gen.generate(bad), ValidationError);
  bad = GenerationRequest{ring(), prompts::TextualPrompt("apple pie"), 5, 0, 50};
  CHECK_THROWS_AS(gen.generate(bad), ValidationError);
}

TEST_CASE("generator failures carry the cache key") {
  ScriptedBackend backend;
  Generator gen(backend, nullptr);
  GenerationRequest req{ring(), prompts::TextualPrompt("apple pie"), 5, 64, 64};
  const auto key = cache_key(req.edges, "apple pie", 5, "scripted");

  backend.fail = true;
  try {
    gen.generate(req);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.cache_key() == key);
    CHECK(e.kind() == BackendError::Kind::server);
    CHECK(e.retryable());
  }

  backend.fail = false;
  backend.wrong_size = true;
  try {
    gen.generate(req);
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.cache_key() == key);
    CHECK(e.kind() == BackendError::Kind::dimension_mismatch);
    CHECK_FALSE(e.retryable());
  }

  const auto results = gen.regenerate_prompt(record("s1", "apple pie"), 2, 9);
  REQUIRE(results.size() == 2);
  for (const auto& r : results) {
    CHECK_FALSE(r.image.has_value());
    CHECK(r.error_kind == BackendError::Kind::dimension_mismatch);
    CHECK(r.cache_key == cache_key(ring(), "apple pie", r.seed, "scripted"));
  }
  CHECK_THROWS_AS(gen.regenerate_prompt(record("s1", "apple pie"), 0, 9), ValidationError);
}

TEST_CASE("regenerating a prompt yields distinct copies at the source size") {
  StubBackend stub;
  Generator gen(stub, nullptr);
  const auto results = gen.regenerate_prompt(record("img_1", "green kite"), 5, 11);
  REQUIRE(results.size() == 5);
  std::set<std::string> digests;
  for (const auto& r : results) {
    REQUIRE(r.image.has_value());
    CHECK(r.seed == copy_seed(11, "img_1", r.k));
    CHECK(r.image->height() == 40);
    CHECK(r.image->width() == 50);
    digests.insert(sha256_hex(r.image->pixels()));
  }
  CHECK(digests.size() == 5);
}

TEST_CASE("threaded regeneration matches a single thread") {
  std::vector<prompts::PromptRecord> prompts;
  const char* texts[] = {"red kite", "apple pie", "blue boat", "train station platform"};
  for (int i = 0; i < 12; ++i) prompts.push_back(record("s" + std::to_string(i), texts[i % 4], 30 + i, 70 - i));
  StubBackend stub;
  Generator one(stub, nullptr, 1);
  Generator four(stub, nullptr, 4);
  const auto a = one.regenerate_all(prompts, 3, 2);
  const auto b = four.regenerate_all(prompts, 3, 2);
  CHECK(a == b);
  REQUIRE(a.size() == 12);
  CHECK(a[5].size() == 3);
  CHECK(a[5][0].height() == 35);

  ScriptedBackend failing;
  failing.fail = true;
  Generator broken(failing, nullptr, 3);
  CHECK_THROWS_AS(broken.regenerate_all(prompts, 2, 2), BackendError);
}

TEST_CASE("protocol handler validates requests") {
  StubBackend stub;
  const auto edges = ring();
  const auto png = base64_encode(imaging::encode_png(imaging::edges_to_gray(edges)));
  const json good = {{"edges_png", png}, {"prompt", "apple pie"}, {"seed", 4}, {"height", 64}, {"width", 64}};

  const auto ok = handle_generate(good.dump(), stub);
  REQUIRE(ok.status == 200);
  const auto img = imaging::decode_png(base64_decode(ok.body["image_png"].get<std::string>()));
  CHECK(img == stub_generate(edges, "apple pie", 4));

  auto code_of = [&](const std::string& body) {
    const auto r = handle_generate(body, stub);
    return std::make_pair(r.status, r.body["error"]["code"].get<std::string>());
  };
  auto with = [&](const char* key, json value) {
    auto j = good;
    j[key] = std::move(value);
    return j.dump();
  };
  auto without = [&](const char* key) {
    auto j = good;
    j.erase(key);
    return j.dump();
  };
  CHECK(code_of("{nope") == std::make_pair(400, std::string("bad_json")));
  CHECK(code_of("[1]") == std::make_pair(400, std::string("bad_json")));
  CHECK(code_of(without("seed")) == std::make_pair(400, std::string("missing_field")));
  CHECK(code_of(with("seed", -1)) == std::make_pair(400, std::string("bad_field")));
  CHECK(code_of(with("prompt", "")) == std::make_pair(400, std::string("bad_field")));
  CHECK(code_of(with("height", 65)) == std::make_pair(400, std::string("bad_dimensions")));
  CHECK(code_of(with("edges_png", "@@@")) == std::make_pair(400, std::string("bad_base64")));
  CHECK(code_of(with("edges_png", base64_encode(std::vector<std::uint8_t>{1, 2, 3}))) ==
        std::make_pair(400, std::string("bad_png")));
  CHECK(code_of(with("height", 128)) == std::make_pair(400, std::string("dimension_mismatch")));

  ScriptedBackend failing;
  failing.fail = true;
  const auto r = handle_generate(good.dump(), failing);
  CHECK(r.status == 500);
  CHECK(r.body["error"]["code"] == "generation_failed");
  CHECK(handle_health(stub).body["backend_id"] == StubBackend::kIdentifier);
}

TEST_CASE("remote backend over the fake server matches the stub") {
  StubBackend stub;
  ProtocolServer server(stub);
  server.start();
  RemoteBackend remote(server.endpoint(), {10.0, 2});
  CHECK(remote.identifier() == StubBackend::kIdentifier);
  const auto e = ring(64, 192);
  CHECK(remote.generate_raw(e, "apple pie", 18446744073709551615ull) ==
        stub_generate(e, "apple pie", 18446744073709551615ull));

  // Same keys, same cache, regardless of transport.
  std::vector<prompts::PromptRecord> prompts{record("a", "red kite"), record("b", "blue boat")};
  Generator local(stub, nullptr);
  Generator over_http(remote, nullptr, 2);
  CHECK(local.regenerate_all(prompts, 2, 3) == over_http.regenerate_all(prompts, 2, 3));

  BackendDescriptor desc;
  desc.kind = BackendDescriptor::Kind::remote;
  desc.endpoint = server.endpoint();
  CHECK(make_backend(desc)->identifier() == StubBackend::kIdentifier);
  server.stop();
}

TEST_CASE("unreachable endpoints raise retryable transport errors") {
  // Grab a free port then release it so nothing is listening there.
  std::string endpoint;
  {
    StubBackend stub;
    ProtocolServer server(stub);
    server.start();
    endpoint = server.endpoint();
    server.stop();
  }
  try {
    RemoteBackend remote(endpoint, {2.0, 1});
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(e.retryable());
    CHECK((e.kind() == BackendError::Kind::transport || e.kind() == BackendError::Kind::timeout));
  }
}

TEST_CASE("stub passes the conformance corpus") {
  std::ifstream in(EDGEREPLAY_CONFORMANCE_CORPUS);
  REQUIRE(in.good());
  const auto corpus = json::parse(in);
  StubBackend stub;
  ProtocolServer server(stub);
  server.start();
  const auto results = run_conformance(server.endpoint(), corpus);
  CHECK(results.size() == corpus["cases"].size());
  for (const auto& r : results) {
    CAPTURE(r.name);
    CAPTURE(r.detail);
    CHECK(r.passed);
  }
  server.stop();
}

TEST_CASE("conformance reports a misbehaving service without throwing") {
  ScriptedBackend broken;
  broken.wrong_size = true;
  ProtocolServer server(broken);
  server.start();
  std::ifstream in(EDGEREPLAY_CONFORMANCE_CORPUS);
  const auto corpus = json::parse(in);
  const auto results = run_conformance(server.endpoint(), corpus);
  int failed = 0;
  for (const auto& r : results) failed += !r.passed;
  CHECK(failed > 0);
  server.stop();
}
