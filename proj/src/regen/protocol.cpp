#include "edgereplay/regen/protocol.hpp"

#include <httplib.h>

#include <mutex>

#include "edgereplay/common/digest.hpp"
#include "edgereplay/common/error.hpp"
#include "edgereplay/imaging/png_io.hpp"

namespace edgereplay::regen {

using nlohmann::json;

namespace {

ProtocolResponse fail(int status, const std::string& code, const std::string& message) {
  return {status, {{"error", {{"code", code}, {"message", message}}}}};
}

}  // namespace

ProtocolResponse handle_health(const GenerationBackend& backend) { return {200, {{"backend_id", backend.identifier()}}}; }

ProtocolResponse handle_generate(const std::string& body, GenerationBackend& backend) {
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception& e) {
    return fail(400, "bad_json", e.what());
  }
  if (!req.is_object()) return fail(400, "bad_json", "request body must be a JSON object");
  for (const char* key : {"edges_png", "prompt", "seed", "height", "width"})
    if (!req.contains(key)) return fail(400, "missing_field", std::string("missing field '") + key + "'");
  if (!req["edges_png"].is_string()) return fail(400, "bad_field", "edges_png must be a string");
  if (!req["prompt"].is_string() || req["prompt"].get<std::string>().empty())
    return fail(400, "bad_field", "prompt must be a non-empty string");
  if (!req["seed"].is_number_unsigned()) return fail(400, "bad_field", "seed must be an unsigned 64-bit integer");
  if (!req["height"].is_number_integer() || !req["width"].is_number_integer())
    return fail(400, "bad_field", "height and width must be integers");

  const auto height = req["height"].get<long long>();
  const auto width = req["width"].get<long long>();
  if (height < 64 || width < 64 || height % 64 != 0 || width % 64 != 0 || height > 4096 || width > 4096)
    return fail(400, "bad_dimensions", "height and width must be multiples of 64 in [64, 4096]");

  std::vector<std::uint8_t> png;
  try {
    png = base64_decode(req["edges_png"].get<std::string>());
  } catch (const DecodeError& e) {
    return fail(400, "bad_base64", e.what());
  }
  imaging::GrayImage gray;
  try {
    gray = imaging::decode_png_gray(png);
  } catch (const Error& e) {
    return fail(400, "bad_png", e.what());
  }
  if (gray.height() != height || gray.width() != width)
    return fail(400, "dimension_mismatch", "edges_png is " + std::to_string(gray.height()) + "x" +
                                               std::to_string(gray.width()) + ", request says " +
                                               std::to_string(height) + "x" + std::to_string(width));
  try {
    const auto img = backend.generate_raw(imaging::gray_to_edges(gray), req["prompt"].get<std::string>(),
                                          req["seed"].get<std::uint64_t>());
    return {200, {{"image_png", base64_encode(imaging::encode_png(img))}}};
  } catch (const std::exception& e) {
    return fail(500, "generation_failed", e.what());
  }
}

struct ProtocolServer::Impl {
  GenerationBackend& backend;
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;
  std::mutex backend_mu;

  explicit Impl(GenerationBackend& b) : backend(b) {
    auto reply = [](httplib::Response& res, const ProtocolResponse& pr) {
      res.status = pr.status;
      res.set_content(pr.body.dump(), "application/json");
    };
    server.Get("/v1/health", [this, reply](const httplib::Request&, httplib::Response& res) {
      reply(res, handle_health(backend));
    });
    server.Post("/v1/generate", [this, reply](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(backend_mu);
      reply(res, handle_generate(req.body, backend));
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (res.body.empty())
        res.set_content(json{{"error", {{"code", "not_found"}, {"message", "no such route"}}}}.dump(), "application/json");
    });
  }
};

ProtocolServer::ProtocolServer(GenerationBackend& backend) : impl_(std::make_unique<Impl>(backend)) {}

ProtocolServer::~ProtocolServer() { stop(); }

int ProtocolServer::start(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (impl_->port < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void ProtocolServer::run(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  impl_->server.listen_after_bind();
}

void ProtocolServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string ProtocolServer::endpoint() const { return "http://" + impl_->host + ":" + std::to_string(impl_->port); }

}  // namespace edgereplay::regen
