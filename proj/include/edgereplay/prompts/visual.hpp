#pragma once

#include <string>
#include <string_view>

#include "edgereplay/imaging/canny.hpp"
#include "edgereplay/imaging/image.hpp"
#include "edgereplay/prompts/dims.hpp"
#include "edgereplay/prompts/labels.hpp"

namespace edgereplay::prompts {

// edge_first:  Canny at the original size, then nearest-neighbour up/down to H x W.
// image_first: resample the image to H x W (Lanczos when growing, pixel area
//              when shrinking), then Canny.
enum class ResizeScheme { edge_first, image_first };

ResizeScheme parse_scheme(std::string_view name);
std::string_view scheme_name(ResizeScheme scheme);

struct VisualPrompt {
  imaging::BitEdgeMap edges;  // H x W, both multiples of 64
  int orig_h = 0;
  int orig_w = 0;
  ResizeScheme scheme = ResizeScheme::edge_first;

  friend bool operator==(const VisualPrompt&, const VisualPrompt&) = default;
};

struct PromptRecord {
  VisualPrompt visual;
  TextualPrompt textual;
  int class_id = 0;
  std::string source_id;

  friend bool operator==(const PromptRecord&, const PromptRecord&) = default;
};

VisualPrompt extract_visual_prompt(const imaging::RgbImage& img, int gamma, ResizeScheme scheme,
                                   const imaging::CannyParams& canny = {});

}  // namespace edgereplay::prompts
