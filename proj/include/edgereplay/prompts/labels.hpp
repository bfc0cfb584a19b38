#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace edgereplay::prompts {

enum class LabelStyle { caltech, food, places };

LabelStyle parse_label_style(std::string_view name);

// Lowercase words separated by single spaces. Every word is alphanumeric and
// contains at least one letter.
class TextualPrompt {
 public:
  TextualPrompt() = default;
  // Throws ValidationError if `text` is not already in normal form.
  explicit TextualPrompt(std::string text);

  const std::string& text() const noexcept { return text_; }
  friend bool operator==(const TextualPrompt&, const TextualPrompt&) = default;

 private:
  std::string text_;
};

// Turns a dataset class label into the prompt text fed to the generator.
//   caltech  "063.electric-guitar-101"  -> "electric guitar"
//   food     "apple_pie"                -> "apple pie"
//   places   "general_store/indoor"     -> "indoor general store"
//            "train_station/platform"   -> "train station platform"
// Throws ValidationError when nothing is left.
TextualPrompt normalize_label(std::string_view raw, LabelStyle style);

struct LabelTable {
  std::vector<std::string> raw;
  std::vector<TextualPrompt> prompts;  // index = class_id

  std::size_t size() const noexcept { return raw.size(); }
};

// One raw label per line; blank lines are rejected.
LabelTable load_label_table(const std::filesystem::path& path, LabelStyle style);
LabelTable make_label_table(std::vector<std::string> raw, LabelStyle style);

}  // namespace edgereplay::prompts
