#include "edgereplay/prompts/labels.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <regex>

#include "edgereplay/common/error.hpp"

namespace edgereplay::prompts {

namespace {

// Places qualifiers that name a part of the scene rather than a variant of it;
// these follow the scene name instead of preceding it.
constexpr std::array<std::string_view, 1> kAppendedQualifiers = {"platform"};

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Lowercase, split on anything that is not alphanumeric, drop digit-only words.
std::string canonical_words(std::string_view s) {
  std::string out;
  std::string word;
  auto flush = [&] {
    const bool has_letter = std::any_of(word.begin(), word.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
    if (has_letter) {
      if (!out.empty()) out.push_back(' ');
      out += word;
    }
    word.clear();
  };
  for (char c : s) {
    if (is_word_char(c))
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    else
      flush();
  }
  flush();
  return out;
}

std::string strip_caltech(std::string_view raw) {
  static const std::regex prefix(R"(^\s*\d+\.)");
  static const std::regex postfix(R"(-\d+\s*$)");
  std::string s(raw);
  s = std::regex_replace(s, prefix, "");
  s = std::regex_replace(s, postfix, "");
  return s;
}

std::string rearrange_places(std::string_view raw) {
  std::string s(raw);
  // Places-365 category files list entries like "/a/abbey 0".
  static const std::regex dir_prefix(R"(^\s*/[a-z]/)");
  static const std::regex index_suffix(R"(\s+\d+\s*$)");
  s = std::regex_replace(s, dir_prefix, "");
  s = std::regex_replace(s, index_suffix, "");
  const auto slash = s.find('/');
  if (slash == std::string::npos) return s;
  const std::string name = s.substr(0, slash);
  const std::string qualifier = canonical_words(s.substr(slash + 1));
  if (qualifier.empty()) return name;
  const bool appended =
      std::find(kAppendedQualifiers.begin(), kAppendedQualifiers.end(), qualifier) != kAppendedQualifiers.end();
  return appended ? name + " " + qualifier : qualifier + " " + name;
}

}  // namespace

LabelStyle parse_label_style(std::string_view name) {
  if (name == "caltech") return LabelStyle::caltech;
  if (name == "food") return LabelStyle::food;
  if (name == "places") return LabelStyle::places;
  throw ValidationError("unknown label style: " + std::string(name));
}

TextualPrompt::TextualPrompt(std::string text) : text_(std::move(text)) {
  if (text_.empty() || canonical_words(text_) != text_)
    throw ValidationError("not a normalized textual prompt: '" + text_ + "'");
}

TextualPrompt normalize_label(std::string_view raw, LabelStyle style) {
  std::string staged;
  switch (style) {
    case LabelStyle::caltech: staged = strip_caltech(raw); break;
    case LabelStyle::food: staged = std::string(raw); break;
    case LabelStyle::places: staged = rearrange_places(raw); break;
  }
  auto text = canonical_words(staged);
  if (text.empty()) throw ValidationError("label '" + std::string(raw) + "' is empty after normalization");
  return TextualPrompt(std::move(text));
}

LabelTable make_label_table(std::vector<std::string> raw, LabelStyle style) {
  LabelTable table;
  table.prompts.reserve(raw.size());
  for (const auto& r : raw) table.prompts.push_back(normalize_label(r, style));
  table.raw = std::move(raw);
  return table;
}

LabelTable load_label_table(const std::filesystem::path& path, LabelStyle style) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read label file " + path.string());
  std::vector<std::string> raw;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw ValidationError("blank line " + std::to_string(raw.size() + 1) + " in " + path.string());
    raw.push_back(line);
  }
  if (raw.empty()) throw ValidationError("label file " + path.string() + " is empty");
  return make_label_table(std::move(raw), style);
}

}  // namespace edgereplay::prompts
