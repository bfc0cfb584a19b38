#include "edgereplay/harness/pipeline.hpp"

#include <algorithm>
#include <cctype>

#include "edgereplay/common/error.hpp"
#include "edgereplay/common/fs.hpp"
#include "edgereplay/harness/features.hpp"
#include "edgereplay/imaging/png_io.hpp"
#include "edgereplay/memory/herding.hpp"

namespace edgereplay::harness {

namespace fs = std::filesystem;

namespace {

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string class_dir(int c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", c);
  return buf;
}

}  // namespace

ImageCollection load_image_dir(const fs::path& dir, std::size_t num_labels) {
  if (!fs::is_directory(dir)) throw ValidationError("input directory not found: " + dir.string());
  ImageCollection out;
  out.by_class.resize(num_labels);
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  std::sort(class_dirs.begin(), class_dirs.end());
  for (const auto& cdir : class_dirs) {
    const auto name = cdir.filename().string();
    if (!all_digits(name) || name.size() > 9) throw ValidationError("class folder is not a class id: " + cdir.string());
    const auto c = static_cast<std::size_t>(std::stoul(name));
    if (c >= num_labels)
      throw ValidationError("class folder " + name + " has no line in the label file (" + std::to_string(num_labels) +
                            " labels)");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(cdir))
      if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files)
      out.by_class[c].push_back({imaging::load_png(f), static_cast<int>(c), f.stem().string()});
  }
  for (std::size_t c = 0; c < num_labels; ++c)
    if (out.by_class[c].empty()) throw ValidationError("no images for class " + std::to_string(c));
  return out;
}

void write_dataset(const Dataset& dataset, const fs::path& dir) {
  auto dump = [&](const std::vector<Sample>& samples, const char* split) {
    for (const auto& s : samples) {
      const auto sub = dir / split / class_dir(s.class_id);
      fs::create_directories(sub);
      imaging::save_png(sub / (s.source_id + ".png"), s.image);
    }
  };
  dump(dataset.train, "train");
  dump(dataset.test, "test");
  std::string labels;
  for (const auto& l : dataset.raw_labels) labels += l + "\n";
  write_file_atomic(dir / "labels.txt", labels);
}

memory::ExemplarStore compress_collection(const ImageCollection& images, const prompts::LabelTable& labels,
                                          const CompressOptions& opts) {
  if (images.by_class.size() != labels.size())
    throw ValidationError("image classes (" + std::to_string(images.by_class.size()) + ") and labels (" +
                          std::to_string(labels.size()) + ") disagree");
  double capacity = opts.capacity;
  if (capacity <= 0.0) {
    std::vector<prompts::Dims> dims;
    for (const auto& cls : images.by_class)
      for (const auto& s : cls) dims.push_back({s.image.height(), s.image.width()});
    capacity = prompts::capacity_per_unit(prompts::avg_area_ratio(dims, opts.gamma));
  }
  const auto ledger = memory::allocate(opts.units_per_class, opts.alpha, capacity);
  memory::ExemplarStore store(ledger);
  for (std::size_t c = 0; c < images.by_class.size(); ++c) {
    const auto& samples = images.by_class[c];
    std::vector<memory::FeatureVector> feats;
    for (const auto& s : samples) feats.push_back(featurize(s.image));
    const int cid = static_cast<int>(c);
    const auto sel = memory::select_exemplars(memory::herding_order(feats, cid), ledger);
    memory::ClassExemplars ex;
    for (std::size_t j : sel.real) ex.real.push_back({cid, samples[j].source_id, samples[j].image});
    for (std::size_t j : sel.prompt_sources) {
      const auto& img = samples[j].image;
      prompts::PromptRecord rec;
      rec.visual = prompts::extract_visual_prompt(img, prompts::choose_gamma(img.height(), img.width(), opts.gamma),
                                                  opts.scheme, opts.canny);
      rec.textual = labels.prompts[c];
      rec.class_id = cid;
      rec.source_id = samples[j].source_id;
      ex.prompts.push_back(std::move(rec));
    }
    store.add_class(cid, std::move(ex));
  }
  return store;
}

RegenerateSummary regenerate_store(const memory::ExemplarStore& store, int copies, std::uint64_t base_seed,
                                   regen::Generator& gen, const fs::path& out) {
  if (copies < 1) throw ValidationError("K must be >= 1");
  RegenerateSummary sum;
  const auto calls_before = gen.backend_calls();
  regen::CacheStats before;
  if (gen.cache()) before = gen.cache()->stats();
  for (const auto& [c, ex] : store.classes()) {
    if (ex.prompts.empty()) continue;
    const auto images = gen.regenerate_all(ex.prompts, copies, base_seed);
    const auto sub = out / class_dir(c);
    fs::create_directories(sub);
    for (std::size_t i = 0; i < images.size(); ++i)
      for (std::size_t k = 0; k < images[i].size(); ++k) {
        write_file_atomic(sub / (ex.prompts[i].source_id + "_k" + std::to_string(k + 1) + ".png"),
                          imaging::encode_png(images[i][k]));
        ++sum.images;
      }
    sum.prompts += ex.prompts.size();
  }
  sum.backend_calls = gen.backend_calls() - calls_before;
  if (gen.cache()) {
    const auto after = gen.cache()->stats();
    sum.cache_hits = after.hits - before.hits;
    sum.cache_misses = after.misses - before.misses;
  }
  return sum;
}

}  // namespace edgereplay::harness
