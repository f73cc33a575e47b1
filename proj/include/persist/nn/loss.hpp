#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace persist::nn {

struct LossAndGradient {
    double loss = 0.0;
    std::vector<double> dlogits;
};

/// Softmax probabilities with max subtraction.
std::vector<double> softmax(std::span<const double> logits);

/// Cross entropy of softmax(logits) against `label`, computed as
/// log-sum-exp minus the selected logit. The gradient is softmax - onehot.
/// Throws std::out_of_range for a bad label, std::invalid_argument for C < 2.
LossAndGradient softmax_cross_entropy(std::span<const double> logits, std::size_t label);

/// Index of the largest logit, lowest index on ties.
std::size_t argmax(std::span<const double> logits);

} // namespace persist::nn
