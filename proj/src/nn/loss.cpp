#include "persist/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace persist::nn {

std::size_t argmax(std::span<const double> logits) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i) {
        if (logits[i] > logits[best]) best = i;
    }
    return best;
}

std::vector<double> softmax(std::span<const double> logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - top);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

LossAndGradient softmax_cross_entropy(std::span<const double> logits, std::size_t label) {
    if (logits.size() < 2) throw std::invalid_argument("cross entropy needs at least two classes");
    if (label >= logits.size())
        throw std::out_of_range("label " + std::to_string(label) + " outside [0, " +
                                std::to_string(logits.size()) + ")");
    const std::size_t top = argmax(logits);
    const double shift = logits[top];
    // The top term contributes exactly exp(0) = 1; summing the rest separately
    // and using log1p keeps tiny losses accurate.
    double rest = 0.0;
    std::vector<double> grad(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        grad[i] = std::exp(logits[i] - shift);
        if (i != top) rest += grad[i];
    }
    const double lse_shifted = std::log1p(rest);
    const double total = 1.0 + rest;
    for (double& g : grad) g /= total;
    grad[label] -= 1.0;
    const double loss = (shift - logits[label]) + lse_shifted;
    return {loss, std::move(grad)};
}

} // namespace persist::nn
