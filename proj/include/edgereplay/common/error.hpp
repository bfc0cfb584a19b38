#pragma once

#include <stdexcept>
#include <string>

namespace edgereplay {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments, configs or inputs. Raised before any side effect where possible.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed binary payloads (EBM1 containers, PNG streams).
class DecodeError : public Error {
 public:
  using Error::Error;
};

// Missing files, checksum mismatches or manifest/ledger inconsistencies in a store.
class StoreCorruption : public Error {
 public:
  using Error::Error;
};

// A generation backend failed. Carries the cache key of the request so callers
// can retry exactly the same generation later.
class BackendError : public Error {
 public:
  enum class Kind { timeout, transport, protocol, server, dimension_mismatch };

  BackendError(Kind kind, std::string cache_key, const std::string& what)
      : Error(what), kind_(kind), cache_key_(std::move(cache_key)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& cache_key() const noexcept { return cache_key_; }
  bool retryable() const noexcept {
    return kind_ == Kind::timeout || kind_ == Kind::transport || kind_ == Kind::server;
  }

 private:
  Kind kind_;
  std::string cache_key_;
};

// Training diverged (non-finite loss or parameters).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace edgereplay
