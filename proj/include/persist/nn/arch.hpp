#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "persist/nn/layers.hpp"

namespace persist::nn {

// Architecture strings are comma-separated tokens:
//
//   dense:N      fully connected layer with N outputs
//   conv:CxK     valid convolution, C output channels, KxK kernel, stride 1
//   pool         2x2 max-pool, stride 2
//   relu         rectifier
//   flatten      collapse (C, H, W) to a vector
//
// Input sizes are inferred from `input`. A Dense head with `num_classes`
// outputs (preceded by flatten if needed) is appended unless the string
// already ends in one. "dense:64,relu" is the default two-layer MLP.
std::vector<LayerSpec> parse_architecture(std::string_view text, Shape input,
                                          std::size_t num_classes);

/// Inverse of parse_architecture for a resolved stack (head included).
std::string format_architecture(const std::vector<LayerSpec>& layers);

} // namespace persist::nn
