#include "edgereplay/regen/remote_backend.hpp"

#include <chrono>

#include <httplib.h>
#include <json.hpp>

#include "edgereplay/common/digest.hpp"
#include "edgereplay/common/error.hpp"
#include "edgereplay/imaging/png_io.hpp"

namespace edgereplay::regen {

using nlohmann::json;
using Kind = BackendError::Kind;

namespace {

httplib::Client make_client(const std::string& endpoint, double timeout_seconds) {
  httplib::Client cli(endpoint);
  const auto t = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::duration<double>(timeout_seconds));
  const auto secs = static_cast<time_t>(t.count() / 1000000);
  const auto usecs = static_cast<time_t>(t.count() % 1000000);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  return cli;
}

[[noreturn]] void throw_transport(httplib::Error err, const std::string& endpoint) {
  const auto kind = (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) ? Kind::timeout : Kind::transport;
  throw BackendError(kind, "", "remote backend " + endpoint + ": " + httplib::to_string(err));
}

std::string error_message(const httplib::Result& res) {
  try {
    auto body = json::parse(res->body);
    const auto& e = body.at("error");
    return e.at("code").get<std::string>() + ": " + e.at("message").get<std::string>();
  } catch (const json::exception&) {
    return "HTTP " + std::to_string(res->status);
  }
}

}  // namespace

RemoteBackend::RemoteBackend(std::string endpoint, RemoteOptions opts)
    : endpoint_(std::move(endpoint)),
      opts_(opts),
      in_flight_(std::make_unique<std::counting_semaphore<>>(std::max(1, opts.max_in_flight))) {
  if (endpoint_.empty()) throw ValidationError("remote backend needs an endpoint");
  auto cli = make_client(endpoint_, opts_.timeout_seconds);
  auto res = cli.Get("/v1/health");
  if (!res) throw_transport(res.error(), endpoint_);
  if (res->status != 200) throw BackendError(res->status >= 500 ? Kind::server : Kind::protocol, "", "health: " + error_message(res));
  try {
    backend_id_ = json::parse(res->body).at("backend_id").get<std::string>();
  } catch (const json::exception&) {
    throw BackendError(Kind::protocol, "", "health: malformed response");
  }
  if (backend_id_.empty()) throw BackendError(Kind::protocol, "", "health: empty backend_id");
}

RemoteBackend::~RemoteBackend() = default;

imaging::RgbImage RemoteBackend::generate_raw(const imaging::BitEdgeMap& edges, const std::string& text, std::uint64_t seed) {
  const json request = {{"edges_png", base64_encode(imaging::encode_png(imaging::edges_to_gray(edges)))},
                        {"prompt", text},
                        {"seed", seed},
                        {"height", edges.height()},
                        {"width", edges.width()}};
  in_flight_->acquire();
  struct Release {
    std::counting_semaphore<>* s;
    ~Release() { s->release(); }
  } release{in_flight_.get()};

  auto cli = make_client(endpoint_, opts_.timeout_seconds);
  auto res = cli.Post("/v1/generate", request.dump(), "application/json");
  if (!res) throw_transport(res.error(), endpoint_);
  if (res->status >= 500) throw BackendError(Kind::server, "", "generate: " + error_message(res));
  if (res->status != 200) throw BackendError(Kind::protocol, "", "generate: " + error_message(res));

  imaging::RgbImage img;
  try {
    const auto body = json::parse(res->body);
    img = imaging::decode_png(base64_decode(body.at("image_png").get<std::string>()));
  } catch (const json::exception&) {
    throw BackendError(Kind::protocol, "", "generate: malformed response body");
  } catch (const DecodeError& e) {
    throw BackendError(Kind::protocol, "", std::string("generate: bad image payload: ") + e.what());
  }
  if (img.height() != edges.height() || img.width() != edges.width())
    throw BackendError(Kind::dimension_mismatch, "",
                       "generate: got " + std::to_string(img.height()) + "x" + std::to_string(img.width()) + ", expected " +
                           std::to_string(edges.height()) + "x" + std::to_string(edges.width()));
  return img;
}

}  // namespace edgereplay::regen
