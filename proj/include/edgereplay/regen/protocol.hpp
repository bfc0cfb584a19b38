#pragma once

#include <memory>
#include <string>
#include <thread>

#include <json.hpp>

#include "edgereplay/regen/backend.hpp"

namespace edgereplay::regen {

struct ProtocolResponse {
  int status = 200;
  nlohmann::json body;
};

// Server side of the generation protocol, independent of any HTTP stack.
// Error bodies are {"error": {"code", "message"}} with codes bad_json,
// missing_field, bad_field, bad_base64, bad_png, bad_dimensions,
// dimension_mismatch (400) and generation_failed (500).
ProtocolResponse handle_generate(const std::string& body, GenerationBackend& backend);
ProtocolResponse handle_health(const GenerationBackend& backend);

// HTTP server exposing a backend over the protocol. Used by the fake-server
// command to stand in for a real diffusion service.
class ProtocolServer {
 public:
  explicit ProtocolServer(GenerationBackend& backend);
  ~ProtocolServer();
  ProtocolServer(const ProtocolServer&) = delete;
  ProtocolServer& operator=(const ProtocolServer&) = delete;

  // Binds (port 0 picks a free port) and serves on a background thread.
  // Returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  // Binds and serves on the calling thread until stop().
  void run(const std::string& host, int port);
  void stop();

  std::string endpoint() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace edgereplay::regen
