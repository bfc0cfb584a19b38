#include <pthread.h>
#include <signal.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "edgereplay/common/error.hpp"
#include "edgereplay/common/fs.hpp"
#include "edgereplay/harness/config.hpp"
#include "edgereplay/harness/dataset.hpp"
#include "edgereplay/harness/experiment.hpp"
#include "edgereplay/harness/phase_plan.hpp"
#include "edgereplay/harness/pipeline.hpp"
#include "edgereplay/harness/report.hpp"
#include "edgereplay/imaging/ebm.hpp"
#include "edgereplay/memory/store.hpp"
#include "edgereplay/regen/cache.hpp"
#include "edgereplay/regen/generator.hpp"
#include "edgereplay/regen/protocol.hpp"
#include "edgereplay/regen/stub_backend.hpp"

namespace fs = std::filesystem;
using namespace edgereplay;

namespace {

enum Exit { kOk = 0, kFailure = 1, kValidation = 2, kBackend = 3, kCorrupt = 4 };

regen::BackendDescriptor backend_from_flag(const std::string& spec, double timeout, int in_flight) {
  regen::BackendDescriptor d;
  if (spec == "stub") return d;
  if (spec.rfind("http://", 0) != 0)
    throw ValidationError("--backend must be \"stub\" or an http:// endpoint, got \"" + spec + "\"");
  d.kind = regen::BackendDescriptor::Kind::remote;
  d.endpoint = spec;
  d.timeout_seconds = timeout;
  d.max_in_flight = in_flight;
  return d;
}

void require_fresh(const fs::path& path, const char* flag) {
  if (!is_fresh_output(path))
    throw ValidationError(std::string(flag) + " " + path.string() + " already exists and is not empty");
}

std::string ascii_edges(const imaging::BitEdgeMap& e) {
  std::string out;
  for (int y = 0; y < e.height(); ++y) {
    for (int x = 0; x < e.width(); ++x) out += e.get(y, x) ? '#' : '.';
    out += '\n';
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgereplay: edge-map rehearsal memory for class-incremental learning"};
  app.require_subcommand(1);

  // gen-dataset
  auto* gen_cmd = app.add_subcommand("gen-dataset", "Render the procedural polygon dataset to PNG files");
  std::string gen_out;
  harness::ProceduralSpec gen_spec;
  gen_cmd->add_option("--out", gen_out, "Output directory (must be fresh)")->required();
  gen_cmd->add_option("--classes", gen_spec.num_classes, "Number of classes C")->check(CLI::Range(2, 1000));
  gen_cmd->add_option("--per-class", gen_spec.per_class, "Images per class before the 80/20 split")
      ->check(CLI::Range(2, 100000));
  gen_cmd->add_option("--size", gen_spec.image_size, "Image side in pixels")->check(CLI::Range(16, 4096));
  gen_cmd->add_option("--seed", gen_spec.seed, "Dataset seed");

  // compress
  auto* comp_cmd = app.add_subcommand("compress", "Select exemplars by herding and write an exemplar store");
  std::string comp_in, comp_labels, comp_out, comp_style = "caltech", comp_gamma = "fixed512",
                                              comp_scheme = "edge_first";
  harness::CompressOptions comp_opts;
  comp_cmd->add_option("--input", comp_in, "Directory of <class_id>/<source>.png images")->required();
  comp_cmd->add_option("--labels", comp_labels, "Label file, one raw label per line, line index = class id")
      ->required();
  comp_cmd->add_option("--style", comp_style, "Label style: caltech, food or places");
  comp_cmd->add_option("--gamma-policy", comp_gamma, "fixed512, caltech_adaptive or fixed:<gamma>");
  comp_cmd->add_option("--scheme", comp_scheme, "edge_first or image_first");
  comp_cmd->add_option("-b,--units", comp_opts.units_per_class, "Memory units per class b")->required();
  comp_cmd->add_option("--alpha", comp_opts.alpha, "Compressed proportion alpha in [0, 1]")->required();
  comp_cmd->add_option("--capacity", comp_opts.capacity, "Edge maps per unit (default: 24 / mean area ratio)");
  comp_cmd->add_option("--canny-low", comp_opts.canny.low, "Canny weak threshold");
  comp_cmd->add_option("--canny-high", comp_opts.canny.high, "Canny strong threshold");
  comp_cmd->add_option("--out", comp_out, "Store directory (must be fresh)")->required();

  // regenerate
  auto* regen_cmd = app.add_subcommand("regenerate", "Generate K images per stored prompt");
  std::string regen_store, regen_out, regen_cache, regen_backend = "stub";
  int regen_k = 1, regen_threads = 1, regen_in_flight = 4;
  double regen_timeout = 120.0;
  std::uint64_t regen_seed = 0;
  regen_cmd->add_option("--store", regen_store, "Exemplar store directory")->required();
  regen_cmd->add_option("-K,--copies", regen_k, "Images per prompt")->check(CLI::Range(1, 1000));
  regen_cmd->add_option("--seed", regen_seed, "Base seed the per-copy seeds derive from");
  regen_cmd->add_option("--backend", regen_backend, "\"stub\" or the http:// endpoint of a generation service");
  regen_cmd->add_option("--timeout", regen_timeout, "Remote request timeout in seconds");
  regen_cmd->add_option("--max-in-flight", regen_in_flight, "Concurrent remote requests")->check(CLI::PositiveNumber);
  regen_cmd->add_option("--threads", regen_threads, "Generation threads")->check(CLI::PositiveNumber);
  regen_cmd->add_option("--cache", regen_cache, "Generation cache directory (default: <out>/cache)");
  regen_cmd->add_option("--out", regen_out, "Output directory")->required();

  // run-cil
  auto* run_cmd = app.add_subcommand("run-cil", "Run a class-incremental experiment on the procedural dataset");
  std::string run_config, run_out;
  run_cmd->add_option("--config", run_config, "Experiment config (JSON)")->required();
  run_cmd->add_option("--out", run_out, "Output directory; an interrupted run resumes here")->required();

  // inspect
  auto* insp_cmd = app.add_subcommand("inspect", "Describe an .ebm container or verify an exemplar store");
  std::string insp_path;
  bool insp_draw = false;
  insp_cmd->add_option("path", insp_path, "File or store directory")->required();
  insp_cmd->add_flag("--draw", insp_draw, "Print the edge map as text");

  // fake-server
  auto* srv_cmd = app.add_subcommand("fake-server", "Serve the generation protocol with the stub backend");
  std::string srv_host = "127.0.0.1";
  int srv_port = 8080;
  srv_cmd->add_option("--host", srv_host, "Bind address");
  srv_cmd->add_option("--port", srv_port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*gen_cmd) {
      require_fresh(gen_out, "--out");
      const auto ds = harness::procedural_dataset(gen_spec);
      harness::write_dataset(ds, gen_out);
      std::printf("wrote %zu train and %zu test images for %d classes to %s\n", ds.train.size(), ds.test.size(),
                  ds.num_classes, gen_out.c_str());
    } else if (*comp_cmd) {
      comp_opts.gamma = prompts::GammaPolicy::parse(comp_gamma);
      comp_opts.scheme = prompts::parse_scheme(comp_scheme);
      const auto labels = prompts::load_label_table(comp_labels, prompts::parse_label_style(comp_style));
      require_fresh(comp_out, "--out");
      const auto images = harness::load_image_dir(comp_in, labels.size());
      const auto store = harness::compress_collection(images, labels, comp_opts);
      memory::store_save(store, comp_out);
      const auto& l = store.ledger();
      std::size_t edge_bytes = 0, rgb_bytes = 0, real_bytes = 0;
      for (const auto& [c, ex] : store.classes()) {
        edge_bytes += memory::prompt_payload_bytes(ex);
        for (const auto& p : ex.prompts) rgb_bytes += static_cast<std::size_t>(p.visual.edges.height()) *
                                                      static_cast<std::size_t>(p.visual.edges.width()) * 3;
        for (const auto& r : ex.real) real_bytes += r.image.pixels().size();
      }
      std::printf("classes %zu  b=%d alpha=%.4g capacity=%.3f\n", store.classes().size(), l.units_per_class, l.alpha,
                  l.capacity_per_unit);
      std::printf("per class: R=%d real + S=%d prompts\n", l.real_slots, l.prompt_slots);
      std::printf("stored: %zu real (%zu pixel bytes), %zu prompts (%zu edge bytes)\n", store.real_count(), real_bytes,
                  store.prompt_count(), edge_bytes);
      if (edge_bytes > 0)
        std::printf("edge compression ratio %.2f : 1 against RGB at the same size\n",
                    static_cast<double>(rgb_bytes) / static_cast<double>(edge_bytes));
    } else if (*regen_cmd) {
      const auto desc = backend_from_flag(regen_backend, regen_timeout, regen_in_flight);
      const auto store = memory::store_load(regen_store);
      if (fs::exists(regen_out) && !fs::is_directory(regen_out))
        throw ValidationError("--out " + regen_out + " is not a directory");
      const fs::path cache_root = regen_cache.empty() ? fs::path(regen_out) / "cache" : fs::path(regen_cache);
      auto backend = regen::make_backend(desc);
      regen::GenerationCache cache(cache_root);
      regen::Generator gen(*backend, &cache, regen_threads);
      const auto sum = harness::regenerate_store(store, regen_k, regen_seed, gen, fs::path(regen_out) / "images");
      std::printf("prompts %zu  images %zu  backend %s\n", sum.prompts, sum.images, gen.backend_id().c_str());
      std::printf("cache: %zu hits, %zu misses, %zu backend calls\n", sum.cache_hits, sum.cache_misses,
                  sum.backend_calls);
    } else if (*run_cmd) {
      const auto cfg = harness::load_config(run_config);
      const auto plan = harness::plan_for(cfg);
      const auto ds = harness::dataset_for(cfg);
      auto backend = regen::make_backend(cfg.backend);
      harness::RunStats stats;
      const auto metrics =
          harness::run_experiment(cfg, plan, ds, *backend, fs::path(run_out) / "work", &stats,
                                  [](std::string_view msg) { std::fprintf(stderr, "%.*s\n", int(msg.size()), msg.data()); });
      harness::write_report(run_out, cfg, metrics);
      std::fputs(harness::metrics_table(metrics).c_str(), stdout);
      std::printf("backend calls %zu, cache hits %zu\n", stats.backend_calls, stats.cache_hits);
    } else if (*insp_cmd) {
      const fs::path p(insp_path);
      if (fs::is_directory(p)) {
        const auto store = memory::store_load(p);
        const auto& l = store.ledger();
        std::printf("store ok: b=%d alpha=%.4g capacity=%.3f R=%d S=%d\n", l.units_per_class, l.alpha,
                    l.capacity_per_unit, l.real_slots, l.prompt_slots);
        for (const auto& [c, ex] : store.classes()) {
          const std::string text = ex.prompts.empty() ? std::string("-") : ex.prompts.front().textual.text();
          std::printf("  class %d: %zu real, %zu prompts (%zu edge bytes) \"%s\"\n", c, ex.real.size(),
                      ex.prompts.size(), memory::prompt_payload_bytes(ex), text.c_str());
        }
      } else {
        const auto bytes = read_file(p);
        const auto dec = imaging::decode_ebm(bytes);
        std::size_t set = 0;
        for (int y = 0; y < dec.edges.height(); ++y)
          for (int x = 0; x < dec.edges.width(); ++x) set += dec.edges.get(y, x) ? 1 : 0;
        std::printf("EBM1 %dx%d (original %dx%d), %zu edge pixels, %zu payload bytes\n", dec.edges.height(),
                    dec.edges.width(), dec.orig_h, dec.orig_w, set, imaging::ebm_payload_bytes(dec.edges));
        if (insp_draw) std::fputs(ascii_edges(dec.edges).c_str(), stdout);
      }
    } else if (*srv_cmd) {
      // Block the stop signals before any thread exists so only sigwait sees them.
      sigset_t stop_signals;
      sigemptyset(&stop_signals);
      sigaddset(&stop_signals, SIGINT);
      sigaddset(&stop_signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);
      regen::StubBackend stub;
      regen::ProtocolServer server(stub);
      const int port = server.start(srv_host, srv_port);
      std::printf("serving %s on http://%s:%d\n", stub.identifier().c_str(), srv_host.c_str(), port);
      std::fflush(stdout);
      int sig = 0;
      sigwait(&stop_signals, &sig);
      server.stop();
    }
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kValidation;
  } catch (const BackendError& e) {
    std::fprintf(stderr, "backend error: %s", e.what());
    if (!e.cache_key().empty()) std::fprintf(stderr, " (cache key %s)", e.cache_key().c_str());
    std::fprintf(stderr, "%s\n", e.retryable() ? "; retryable" : "");
    return kBackend;
  } catch (const StoreCorruption& e) {
    std::fprintf(stderr, "store corruption: %s\n", e.what());
    return kCorrupt;
  } catch (const DecodeError& e) {
    std::fprintf(stderr, "decode error: %s\n", e.what());
    return kCorrupt;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kOk;
}
