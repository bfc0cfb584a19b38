#include "edgereplay/regen/generator.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "edgereplay/common/error.hpp"
#include "edgereplay/imaging/resize.hpp"

namespace edgereplay::regen {

Generator::Generator(GenerationBackend& backend, GenerationCache* cache, int threads)
    : backend_(backend), cache_(cache), threads_(std::max(1, threads)), backend_id_(backend.identifier()) {}

imaging::RgbImage Generator::generate(const GenerationRequest& req) {
  req.validate();
  const auto key = cache_key(req.edges, req.text.text(), req.seed, backend_id_);
  std::optional<imaging::RgbImage> raw;
  if (cache_) raw = cache_->get(key);
  if (!raw) {
    ++backend_calls_;
    try {
      raw = backend_.generate_raw(req.edges, req.text.text(), req.seed);
    } catch (const BackendError& e) {
      throw BackendError(e.kind(), key, e.what());
    }
    if (raw->height() != req.edges.height() || raw->width() != req.edges.width())
      throw BackendError(BackendError::Kind::dimension_mismatch, key,
                         "backend returned " + std::to_string(raw->height()) + "x" + std::to_string(raw->width()) +
                             " for a " + std::to_string(req.edges.height()) + "x" + std::to_string(req.edges.width()) +
                             " edge map");
    if (cache_) cache_->put(key, *raw);
  }
  if (raw->height() == req.out_h && raw->width() == req.out_w) return std::move(*raw);
  const auto method = imaging::preferred_method(raw->height(), raw->width(), req.out_h, req.out_w);
  return imaging::resize_rgb(*raw, req.out_h, req.out_w, method);
}

std::vector<CopyResult> Generator::regenerate_prompt(const prompts::PromptRecord& prompt, int copies,
                                                     std::uint64_t base_seed) {
  if (copies < 1) throw ValidationError("copies per prompt must be >= 1");
  std::vector<CopyResult> out(static_cast<std::size_t>(copies));
  for (int k = 1; k <= copies; ++k) {
    auto& r = out[static_cast<std::size_t>(k - 1)];
    r.k = k;
    r.seed = copy_seed(base_seed, prompt.source_id, k);
    r.cache_key = cache_key(prompt.visual.edges, prompt.textual.text(), r.seed, backend_id_);
    GenerationRequest req{prompt.visual.edges, prompt.textual, r.seed, prompt.visual.orig_h, prompt.visual.orig_w};
    try {
      r.image = generate(req);
    } catch (const BackendError& e) {
      r.error = e.what();
      r.retryable = e.retryable();
      r.error_kind = e.kind();
    }
  }
  return out;
}

std::vector<std::vector<imaging::RgbImage>> Generator::regenerate_all(std::span<const prompts::PromptRecord> prompts,
                                                                      int copies, std::uint64_t base_seed) {
  std::vector<std::vector<imaging::RgbImage>> out(prompts.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < prompts.size(); i = next++) {
      try {
        auto results = regenerate_prompt(prompts[i], copies, base_seed);
        for (auto& r : results) {
          if (!r.image) throw BackendError(r.error_kind, r.cache_key, r.error);
          out[i].push_back(std::move(*r.image));
        }
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = prompts.size();
      }
    }
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(threads_), std::max<std::size_t>(1, prompts.size()));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace edgereplay::regen
