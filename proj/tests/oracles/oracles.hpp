#pragma once

// Deliberately slow reference implementations used to cross-check the
// engine. They share conventions with it but no code.

#include <cstdint>
#include <vector>

#include "edgereplay/harness/classifier.hpp"
#include "edgereplay/imaging/image.hpp"

namespace oracle {

// Canny written the textbook way: full 2-D convolutions, atan2 angles,
// hysteresis by repeated relaxation until nothing changes. Row-major 0/1.
std::vector<std::uint8_t> naive_canny(const edgereplay::imaging::RgbImage& img, double low = 100.0,
                                      double high = 200.0);

// Greedy herding that recomputes every candidate mean from scratch.
std::vector<std::size_t> brute_herding(const std::vector<std::vector<double>>& features);

// Central differences of the mean cross-entropy, parameter by parameter.
edgereplay::harness::Gradient numeric_gradient(const edgereplay::harness::ClassifierState& state,
                                               const std::vector<edgereplay::harness::Example>& batch,
                                               double eps = 1e-5);

}  // namespace oracle
