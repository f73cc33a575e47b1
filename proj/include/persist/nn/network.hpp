#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "persist/nn/layers.hpp"

namespace persist::nn {

using ParameterVector = std::vector<double>;
using GradientVector = std::vector<double>;

/// A single example's input; must hold exactly input_shape().size() values.
using Inputs = std::vector<std::span<const double>>;

/// Layer stack plus one flat parameter vector holding every layer's
/// weights followed by its biases, in layer order.
class Network {
public:
    /// Validates that the layers chain from `input`; parameters start at zero.
    Network(Shape input, std::vector<LayerSpec> layers);

    const std::vector<LayerSpec>& layers() const { return layers_; }
    Shape input_shape() const { return shapes_.front(); }
    Shape output_shape() const { return shapes_.back(); }
    /// Shape entering layer i; shapes()[layers().size()] is the output.
    const std::vector<Shape>& shapes() const { return shapes_; }
    std::size_t num_classes() const { return shapes_.back().size(); }

    std::size_t parameter_count() const { return params_.size(); }
    std::size_t parameter_offset(std::size_t layer) const { return offsets_.at(layer); }

    std::span<const double> params() const { return params_; }
    /// Any mutable access invalidates outstanding forward caches.
    std::span<double> mutable_params() {
        ++revision_;
        return params_;
    }
    void set_params(std::span<const double> values);
    std::uint64_t revision() const { return revision_; }

private:
    std::vector<LayerSpec> layers_;
    std::vector<Shape> shapes_;
    std::vector<std::size_t> offsets_;
    ParameterVector params_;
    std::uint64_t revision_ = 0;
};

/// Builds a network and draws weights from U(-1/sqrt(fan_in), 1/sqrt(fan_in))
/// using SplitMix64(seed), layer by layer in storage order. Biases are zero.
Network init_network(Shape input, const std::vector<LayerSpec>& layers, std::uint64_t seed);
/// Same, with the input shape taken from a leading Dense layer.
Network init_network(const std::vector<LayerSpec>& layers, std::uint64_t seed);

/// Activations recorded by forward() for a later backward().
struct ForwardCache {
    const Network* network = nullptr;
    std::uint64_t revision = 0;
    /// [example][layer]: the input to that layer; the last entry is the logits.
    std::vector<std::vector<std::vector<double>>> activations;
    /// [example][layer]: max-pool routing, empty for other layers.
    std::vector<std::vector<std::vector<std::size_t>>> pool_argmax;

    std::size_t batch_size() const { return activations.size(); }
    bool empty() const { return network == nullptr; }
};

struct ForwardPass {
    std::vector<std::vector<double>> logits;
    ForwardCache cache;
};

ForwardPass forward(const Network& net, const Inputs& batch);

/// Sum over the minibatch of per-example parameter gradients. Each example's
/// gradient is formed separately and added in ascending example order.
GradientVector backward(const Network& net, const ForwardCache& cache,
                        std::span<const std::vector<double>> dlogits);

/// Gradient of the loss with respect to the network input, for one cached example.
std::vector<double> input_gradient(const Network& net, const ForwardCache& cache,
                                   std::size_t example, std::span<const double> dlogits);

/// Throws DivergenceError naming the first non-finite index.
void require_finite(std::span<const double> values, const char* what);

} // namespace persist::nn
