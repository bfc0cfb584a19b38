#include "edgereplay/harness/experiment.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>

#include <json.hpp>

#include "edgereplay/common/digest.hpp"
#include "edgereplay/common/error.hpp"
#include "edgereplay/common/fs.hpp"
#include "edgereplay/common/rng.hpp"
#include "edgereplay/harness/classifier.hpp"
#include "edgereplay/harness/features.hpp"
#include "edgereplay/harness/sampling.hpp"
#include "edgereplay/memory/herding.hpp"
#include "edgereplay/memory/store.hpp"
#include "edgereplay/prompts/visual.hpp"
#include "edgereplay/regen/cache.hpp"
#include "edgereplay/regen/generator.hpp"

namespace edgereplay::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> Metrics::per_phase() const {
  std::vector<double> out;
  for (const auto& p : phases) out.push_back(p.accuracy);
  return out;
}

double Metrics::average() const {
  if (phases.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : phases) s += p.accuracy;
  return s / static_cast<double>(phases.size());
}

double Metrics::last() const { return phases.empty() ? 0.0 : phases.back().accuracy; }

std::uint64_t epoch_seed(std::uint64_t experiment_seed, int phase, int epoch) {
  return derive_seed(derive_seed(experiment_seed, "phase", static_cast<std::uint64_t>(phase)), "epoch",
                     static_cast<std::uint64_t>(epoch));
}

std::uint64_t copies_seed(std::uint64_t experiment_seed) { return derive_seed(experiment_seed, "copies"); }

double resolve_capacity(const ExperimentConfig& cfg, const Dataset& dataset) {
  if (cfg.train.capacity > 0.0) return cfg.train.capacity;
  std::vector<prompts::Dims> dims;
  dims.reserve(dataset.train.size());
  for (const auto& s : dataset.train) dims.push_back({s.image.height(), s.image.width()});
  return prompts::capacity_per_unit(prompts::avg_area_ratio(dims, cfg.gamma));
}

PhasePlan plan_for(const ExperimentConfig& cfg) {
  return make_phase_plan(cfg.classes, cfg.phases, cfg.protocol, cfg.train.experiment_seed);
}

Dataset dataset_for(const ExperimentConfig& cfg) {
  return procedural_dataset({cfg.classes, cfg.per_class, cfg.image_size, cfg.dataset_seed});
}

namespace {

std::string phase_dir(int i) { return "phase_" + std::to_string(i); }

json record_json(const PhaseRecord& r) {
  return {{"phase", r.phase},
          {"new_classes", r.new_classes},
          {"seen_classes", r.seen_classes},
          {"accuracy", r.accuracy},
          {"stream_size", r.stream_size},
          {"real_exemplars", r.real_exemplars},
          {"prompt_exemplars", r.prompt_exemplars}};
}

PhaseRecord record_from(const json& j) {
  PhaseRecord r;
  r.phase = j.at("phase").get<int>();
  r.new_classes = j.at("new_classes").get<std::vector<int>>();
  r.seen_classes = j.at("seen_classes").get<int>();
  r.accuracy = j.at("accuracy").get<double>();
  r.stream_size = j.at("stream_size").get<std::size_t>();
  r.real_exemplars = j.at("real_exemplars").get<std::size_t>();
  r.prompt_exemplars = j.at("prompt_exemplars").get<std::size_t>();
  return r;
}

std::string run_digest(const ExperimentConfig& cfg, const PhasePlan& plan, const std::string& backend_id) {
  json j = to_json(cfg);
  // Endpoints and transport knobs do not change results; the backend id does.
  j.erase("backend");
  j.erase("threads");
  j["plan"] = plan.classes_per_phase;
  j["backend_id"] = backend_id;
  return to_hex(sha256(j.dump()));
}

struct Checkpoint {
  ClassifierState state;
  std::vector<PhaseRecord> records;
};

void write_checkpoint(const fs::path& path, const std::string& digest, const ClassifierState& state,
                      const std::vector<PhaseRecord>& records) {
  json j;
  j["run"] = digest;
  j["classifier"] = {{"dim", state.dim()},
                     {"class_ids", state.class_ids()},
                     {"weights", state.weights()},
                     {"bias", state.bias()}};
  j["phases"] = json::array();
  for (const auto& r : records) j["phases"].push_back(record_json(r));
  write_file_atomic(path, j.dump());
}

std::optional<Checkpoint> read_checkpoint(const fs::path& path, const std::string& digest) {
  const auto bytes = read_file(path);
  json j;
  try {
    j = json::parse(bytes.begin(), bytes.end());
    if (j.at("run").get<std::string>() != digest)
      throw ValidationError("work directory holds a run with a different config: " + path.string());
    Checkpoint cp;
    const auto& c = j.at("classifier");
    cp.state = ClassifierState(c.at("dim").get<int>());
    const auto ids = c.at("class_ids").get<std::vector<int>>();
    cp.state.add_classes(ids);
    cp.state.weights() = c.at("weights").get<std::vector<double>>();
    cp.state.bias() = c.at("bias").get<std::vector<double>>();
    if (cp.state.weights().size() != ids.size() * static_cast<std::size_t>(cp.state.dim()) ||
        cp.state.bias().size() != ids.size())
      throw StoreCorruption("checkpoint classifier shape is inconsistent: " + path.string());
    for (const auto& r : j.at("phases")) cp.records.push_back(record_from(r));
    return cp;
  } catch (const json::exception& e) {
    throw StoreCorruption("unreadable checkpoint " + path.string() + ": " + e.what());
  }
}

void add_copies(std::vector<memory::FeatureVector>& table, const std::vector<imaging::RgbImage>& images,
                std::vector<std::size_t>& out) {
  for (const auto& img : images) {
    out.push_back(table.size());
    table.push_back(featurize(img));
  }
}

}  // namespace

Metrics run_experiment(const ExperimentConfig& cfg, const PhasePlan& plan, const Dataset& dataset,
                       regen::GenerationBackend& backend, const fs::path& work_dir, RunStats* stats,
                       const Logger& log, const EpochObserver& observe) {
  cfg.validate();
  if (dataset.num_classes != cfg.classes)
    throw ValidationError("dataset has " + std::to_string(dataset.num_classes) + " classes, config C = " +
                          std::to_string(cfg.classes));
  if (dataset.labels.prompts.size() != static_cast<std::size_t>(dataset.num_classes))
    throw ValidationError("dataset label table does not cover every class");
  {
    std::vector<int> all;
    for (const auto& g : plan.classes_per_phase) all.insert(all.end(), g.begin(), g.end());
    std::sort(all.begin(), all.end());
    std::vector<int> want(static_cast<std::size_t>(cfg.classes));
    std::iota(want.begin(), want.end(), 0);
    if (all != want) throw ValidationError("phase plan does not partition the dataset's classes");
  }
  auto say = [&](const std::string& msg) {
    if (log) log(msg);
  };

  const auto& tc = cfg.train;
  Metrics metrics;
  metrics.ledger = memory::allocate(tc.units_per_class, tc.alpha, resolve_capacity(cfg, dataset));
  const auto& ledger = metrics.ledger;

  fs::create_directories(work_dir / "checkpoint");
  fs::create_directories(work_dir / "store");
  regen::GenerationCache cache(work_dir / "cache");
  regen::Generator gen(backend, &cache, cfg.threads);
  const std::string digest = run_digest(cfg, plan, gen.backend_id());
  const std::uint64_t base_seed = copies_seed(tc.experiment_seed);

  // Features of every real image, computed once.
  std::vector<memory::FeatureVector> train_feat, test_feat;
  train_feat.reserve(dataset.train.size());
  for (const auto& s : dataset.train) train_feat.push_back(featurize(s.image));
  for (const auto& s : dataset.test) test_feat.push_back(featurize(s.image));
  std::map<int, std::vector<std::size_t>> train_of;
  for (std::size_t i = 0; i < dataset.train.size(); ++i) train_of[dataset.train[i].class_id].push_back(i);

  auto prompt_of = [&](const imaging::RgbImage& img, int class_id, const std::string& source_id) {
    prompts::PromptRecord rec;
    rec.visual = prompts::extract_visual_prompt(img, prompts::choose_gamma(img.height(), img.width(), cfg.gamma),
                                                cfg.scheme, cfg.canny);
    rec.textual = dataset.labels.prompts[static_cast<std::size_t>(class_id)];
    rec.class_id = class_id;
    rec.source_id = source_id;
    return rec;
  };

  ClassifierState state(kFeatureDim);
  memory::ExemplarStore store(ledger);
  int start = 0;
  for (int i = static_cast<int>(plan.phases()) - 1; i >= 0; --i) {
    const auto cp_path = work_dir / "checkpoint" / (phase_dir(i) + ".json");
    if (!fs::exists(cp_path)) continue;
    auto cp = read_checkpoint(cp_path, digest);
    state = std::move(cp->state);
    metrics.phases = std::move(cp->records);
    store = memory::store_load(work_dir / "store" / phase_dir(i));
    if (!(store.ledger() == ledger)) throw StoreCorruption("resumed store ledger disagrees with the config");
    start = i + 1;
    say("resuming after phase " + std::to_string(i));
    break;
  }
  if (stats) stats->resumed_phases = start;

  const SamplingParams sampling{tc.p, tc.copies, tc.augment_exemplars};
  const bool augment_new = tc.p > 0.0;
  const bool augment_old = tc.p > 0.0 && tc.augment_exemplars;

  for (int phase = start; phase < static_cast<int>(plan.phases()); ++phase) {
    const auto& new_classes = plan.classes_per_phase[static_cast<std::size_t>(phase)];
    std::vector<memory::FeatureVector> table;
    std::vector<PoolItem> pool;

    // New-class data D_i, with K generated copies each when augmenting.
    std::map<int, std::vector<prompts::PromptRecord>> new_prompts;
    for (int c : new_classes) {
      for (std::size_t idx : train_of[c]) {
        const auto& s = dataset.train[idx];
        if (augment_new || ledger.prompt_slots > 0) new_prompts[c].push_back(prompt_of(s.image, c, s.source_id));
      }
    }
    for (int c : new_classes) {
      std::vector<std::vector<imaging::RgbImage>> copies;
      if (augment_new) copies = gen.regenerate_all(new_prompts[c], tc.copies, base_seed);
      const auto& members = train_of[c];
      for (std::size_t j = 0; j < members.size(); ++j) {
        PoolItem item{PoolItem::Kind::new_real, c, table.size(), {}};
        table.push_back(train_feat[members[j]]);
        if (augment_new) add_copies(table, copies[j], item.copies);
        pool.push_back(std::move(item));
      }
    }

    // Stored exemplars: real images E and regenerated prompts.
    for (const auto& [c, ex] : store.classes()) {
      std::vector<prompts::PromptRecord> real_prompts;
      if (augment_old)
        for (const auto& r : ex.real) real_prompts.push_back(prompt_of(r.image, c, r.source_id));
      std::vector<std::vector<imaging::RgbImage>> real_copies;
      if (augment_old) real_copies = gen.regenerate_all(real_prompts, tc.copies, base_seed);
      for (std::size_t j = 0; j < ex.real.size(); ++j) {
        PoolItem item{PoolItem::Kind::exemplar_real, c, table.size(), {}};
        table.push_back(featurize(ex.real[j].image));
        if (augment_old) add_copies(table, real_copies[j], item.copies);
        pool.push_back(std::move(item));
      }
      if (!ex.prompts.empty()) {
        const auto regenerated = gen.regenerate_all(ex.prompts, tc.copies, base_seed);
        for (const auto& copies : regenerated) {
          PoolItem item{PoolItem::Kind::prompt, c, 0, {}};
          add_copies(table, copies, item.copies);
          pool.push_back(std::move(item));
        }
      }
    }

    state.add_classes(new_classes);
    TrainSchedule schedule{tc.learning_rate, phase == 0 ? tc.epochs_first : tc.epochs_later, tc.batch_size};
    std::size_t stream_size = 0;
    train_phase(
        state,
        [&](int epoch) {
          Rng rng(epoch_seed(tc.experiment_seed, phase, epoch));
          const auto view = epoch_view(pool, sampling, rng);
          std::vector<Example> out;
          out.reserve(view.size());
          for (const auto& e : view) out.push_back({table[e.feature], e.class_id});
          stream_size = out.size();
          if (observe) observe(phase, epoch, out);
          return out;
        },
        schedule);

    std::vector<int> seen = state.class_ids();
    std::sort(seen.begin(), seen.end());
    std::vector<Example> test;
    for (std::size_t i = 0; i < dataset.test.size(); ++i)
      if (std::binary_search(seen.begin(), seen.end(), dataset.test[i].class_id))
        test.push_back({test_feat[i], dataset.test[i].class_id});
    const double acc = evaluate(state, test);

    // Herding ranks each new class; the top R stay real, the next S become prompts.
    for (int c : new_classes) {
      const auto& members = train_of[c];
      std::vector<memory::FeatureVector> feats;
      for (std::size_t idx : members) feats.push_back(train_feat[idx]);
      const auto sel = memory::select_exemplars(memory::herding_order(feats, c), ledger);
      memory::ClassExemplars ex;
      for (std::size_t j : sel.real) {
        const auto& s = dataset.train[members[j]];
        ex.real.push_back({c, s.source_id, s.image});
      }
      for (std::size_t j : sel.prompt_sources) ex.prompts.push_back(new_prompts[c][j]);
      store.add_class(c, std::move(ex));
    }

    const auto snap = work_dir / "store" / phase_dir(phase);
    if (fs::exists(snap)) fs::remove_all(snap);  // left by an interrupted phase
    memory::store_save(store, snap);

    PhaseRecord rec;
    rec.phase = phase;
    rec.new_classes = new_classes;
    rec.seen_classes = static_cast<int>(seen.size());
    rec.accuracy = acc;
    rec.stream_size = stream_size;
    rec.real_exemplars = store.real_count();
    rec.prompt_exemplars = store.prompt_count();
    metrics.phases.push_back(rec);
    write_checkpoint(work_dir / "checkpoint" / (phase_dir(phase) + ".json"), digest, state, metrics.phases);
    say("phase " + std::to_string(phase) + ": " + std::to_string(seen.size()) + " classes, accuracy " +
        std::to_string(acc));
  }

  if (stats) {
    const auto cs = cache.stats();
    stats->backend_calls = gen.backend_calls();
    stats->cache_hits = cs.hits;
    stats->cache_misses = cs.misses;
  }
  return metrics;
}

}  // namespace edgereplay::harness
