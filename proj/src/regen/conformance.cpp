#include "edgereplay/regen/conformance.hpp"

#include <httplib.h>

#include <cmath>
#include <map>

#include "edgereplay/common/digest.hpp"
#include "edgereplay/common/error.hpp"
#include "edgereplay/imaging/png_io.hpp"
#include "edgereplay/regen/remote_backend.hpp"

namespace edgereplay::regen {

using nlohmann::json;

imaging::BitEdgeMap corpus_edges(const json& spec) {
  const int h = spec.at("height").get<int>();
  const int w = spec.at("width").get<int>();
  const auto shape = spec.at("shape").get<std::string>();
  imaging::BitEdgeMap e(h, w);
  const double cy = (h - 1) / 2.0, cx = (w - 1) / 2.0;
  const double r = 0.35 * std::min(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double d = std::hypot(y - cy, x - cx);
      bool on = false;
      if (shape == "ring") on = std::abs(d - r) < 0.6;
      else if (shape == "disk") on = d < r;
      else if (shape == "diagonal") on = (x == y * w / h);
      else if (shape != "blank") throw ValidationError("corpus: unknown edge shape " + shape);
      if (on) e.set(y, x);
    }
  }
  return e;
}

namespace {

json build_request(const json& spec) {
  const auto edges = corpus_edges(spec.at("edges"));
  json req = {{"edges_png", base64_encode(imaging::encode_png(imaging::edges_to_gray(edges)))},
              {"prompt", spec.value("prompt", std::string("stub"))},
              {"seed", spec.value("seed", std::uint64_t{0})},
              {"height", edges.height()},
              {"width", edges.width()}};
  if (spec.contains("override"))
    for (auto& [k, v] : spec["override"].items()) req[k] = v;
  if (spec.contains("omit"))
    for (const auto& k : spec["omit"]) req.erase(k.get<std::string>());
  return req;
}

std::string error_code(const std::string& body) {
  try {
    return json::parse(body).at("error").at("code").get<std::string>();
  } catch (const json::exception&) {
    return {};
  }
}

}  // namespace

std::vector<ConformanceResult> run_conformance(const std::string& endpoint, const json& corpus) {
  std::vector<ConformanceResult> results;
  std::map<std::string, std::string> image_digests;  // case name -> sha256 of decoded pixels
  httplib::Client cli(endpoint);
  cli.set_read_timeout(120, 0);

  for (const auto& c : corpus.at("cases")) {
    ConformanceResult r;
    r.name = c.at("name").get<std::string>();
    const auto& expect = c.at("expect");
    try {
      const auto method = c.value("method", std::string("POST"));
      const auto path = c.value("path", std::string("/v1/generate"));

      if (c.value("client", false)) {
        // Through the engine's own client: pixels must match the raw POST path.
        RemoteBackend backend(endpoint);
        const auto& rq = c.at("request");
        const auto edges = corpus_edges(rq.at("edges"));
        const auto img = backend.generate_raw(edges, rq.at("prompt").get<std::string>(), rq.at("seed").get<std::uint64_t>());
        const auto digest = sha256_hex(img.pixels());
        auto raw = cli.Post(path, build_request(rq).dump(), "application/json");
        if (!raw || raw->status != 200) throw Error("raw request failed");
        const auto raw_img = imaging::decode_png(base64_decode(json::parse(raw->body).at("image_png").get<std::string>()));
        r.passed = img == raw_img && img.height() == edges.height() && img.width() == edges.width();
        r.detail = r.passed ? "client image matches raw response" : "client and raw responses differ";
        results.push_back(r);
        continue;
      }

      httplib::Result res = method == "GET"
                                ? cli.Get(path)
                                : cli.Post(path, c.contains("raw_body") ? c["raw_body"].get<std::string>()
                                                                        : build_request(c.at("request")).dump(),
                                           "application/json");
      if (!res) throw Error("transport error: " + httplib::to_string(res.error()));
      const int want_status = expect.at("status").get<int>();
      if (res->status != want_status) throw Error("status " + std::to_string(res->status) + ", expected " + std::to_string(want_status));

      if (expect.contains("error_code") && error_code(res->body) != expect["error_code"].get<std::string>())
        throw Error("error code '" + error_code(res->body) + "', expected '" + expect["error_code"].get<std::string>() + "'");
      if (expect.value("backend_id", false)) {
        const auto id = json::parse(res->body).at("backend_id").get<std::string>();
        if (id.empty()) throw Error("empty backend_id");
      }
      if (expect.contains("image")) {
        const auto img = imaging::decode_png(base64_decode(json::parse(res->body).at("image_png").get<std::string>()));
        if (img.height() != expect["image"].at("height").get<int>() || img.width() != expect["image"].at("width").get<int>())
          throw Error("image is " + std::to_string(img.height()) + "x" + std::to_string(img.width()));
        const auto digest = sha256_hex(img.pixels());
        image_digests[r.name] = digest;
        if (expect.value("deterministic", false)) {
          auto again = cli.Post(path, build_request(c.at("request")).dump(), "application/json");
          if (!again || again->status != 200) throw Error("repeat request failed");
          const auto img2 = imaging::decode_png(base64_decode(json::parse(again->body).at("image_png").get<std::string>()));
          if (sha256_hex(img2.pixels()) != digest) throw Error("repeat request returned a different image");
        }
        if (expect.contains("differs_from")) {
          const auto other = expect["differs_from"].get<std::string>();
          if (!image_digests.contains(other)) throw Error("reference case '" + other + "' has no image");
          if (image_digests[other] == digest) throw Error("image identical to case '" + other + "'");
        }
      }
      r.passed = true;
      r.detail = "ok";
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = e.what();
    }
    results.push_back(r);
  }
  return results;
}

}  // namespace edgereplay::regen
