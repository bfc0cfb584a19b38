#include "edgereplay/prompts/visual.hpp"

#include "edgereplay/common/error.hpp"
#include "edgereplay/imaging/resize.hpp"

namespace edgereplay::prompts {

ResizeScheme parse_scheme(std::string_view name) {
  if (name == "edge_first") return ResizeScheme::edge_first;
  if (name == "image_first") return ResizeScheme::image_first;
  throw ValidationError("unknown resize scheme: " + std::string(name));
}

std::string_view scheme_name(ResizeScheme scheme) {
  return scheme == ResizeScheme::edge_first ? "edge_first" : "image_first";
}

VisualPrompt extract_visual_prompt(const imaging::RgbImage& img, int gamma, ResizeScheme scheme,
                                   const imaging::CannyParams& canny) {
  const int h = img.height();
  const int w = img.width();
  const auto target = target_dims(h, w, gamma);
  VisualPrompt vp;
  vp.orig_h = h;
  vp.orig_w = w;
  vp.scheme = scheme;
  if (scheme == ResizeScheme::edge_first) {
    vp.edges = imaging::resize_edges_nearest(imaging::canny_edges(img, canny), target.height, target.width);
  } else {
    const auto method = imaging::preferred_method(h, w, target.height, target.width);
    const auto resized = (target.height == h && target.width == w)
                             ? img
                             : imaging::resize_rgb(img, target.height, target.width, method);
    vp.edges = imaging::canny_edges(resized, canny);
  }
  return vp;
}

}  // namespace edgereplay::prompts
