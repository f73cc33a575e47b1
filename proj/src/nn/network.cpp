#include "persist/nn/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "persist/errors.hpp"
#include "persist/rng.hpp"

namespace persist::nn {

Network::Network(Shape input, std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw ConfigError("network needs at least one layer");
    if (input.size() == 0) throw ConfigError("network input shape is empty");
    shapes_.push_back(input);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        try {
            shapes_.push_back(nn::output_shape(layers_[i], shapes_.back()));
        } catch (const ShapeError& e) {
            const std::string prev =
                i == 0 ? std::string("network input ") + input.to_string()
                       : "layer " + std::to_string(i - 1) + " " + layers_[i - 1].describe();
            throw ConfigError("layer " + std::to_string(i) + " " + layers_[i].describe() +
                              " does not chain from " + prev + ": " + e.what());
        }
        offsets_.push_back(offset);
        offset += layers_[i].parameter_count();
    }
    params_.assign(offset, 0.0);
}

void Network::set_params(std::span<const double> values) {
    if (values.size() != params_.size())
        throw ShapeError("parameter count mismatch: network has " + std::to_string(params_.size()) +
                         ", got " + std::to_string(values.size()));
    std::copy(values.begin(), values.end(), mutable_params().begin());
}

Network init_network(Shape input, const std::vector<LayerSpec>& layers, std::uint64_t seed) {
    Network net(input, layers);
    SplitMix64 rng(seed);
    auto params = net.mutable_params();
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& layer = layers[i];
        if (layer.parameter_count() == 0) continue;
        const double bound = 1.0 / std::sqrt(static_cast<double>(layer.fan_in()));
        auto weights = params.subspan(net.parameter_offset(i), layer.weight_count());
        for (double& w : weights) w = rng.uniform(-bound, bound);
    }
    require_finite(net.params(), "initial parameters");
    return net;
}

Network init_network(const std::vector<LayerSpec>& layers, std::uint64_t seed) {
    if (layers.empty() || layers.front().kind != LayerKind::Dense)
        throw ConfigError("input shape can only be inferred from a leading Dense layer");
    return init_network(Shape::flat(layers.front().in_dim), layers, seed);
}

namespace {

struct LayerParams {
    std::span<const double> weights;
    std::span<const double> bias;
};

LayerParams layer_params(const Network& net, std::size_t i) {
    const LayerSpec& layer = net.layers()[i];
    const auto all = net.params().subspan(net.parameter_offset(i), layer.parameter_count());
    return {all.first(layer.weight_count()), all.subspan(layer.weight_count())};
}

void check_cache(const Network& net, const ForwardCache& cache) {
    if (cache.empty()) throw std::logic_error("backward called without a forward cache");
    if (cache.network != &net) throw std::logic_error("forward cache belongs to a different network");
    if (cache.revision != net.revision())
        throw std::logic_error("stale forward cache: parameters changed after forward()");
}

// Gradient of one cached example written into `grad` (which must be zeroed).
// Returns the gradient with respect to the network input.
std::vector<double> backward_example(const Network& net, const ForwardCache& cache, std::size_t ex,
                                     std::span<const double> dlogits, std::span<double> grad) {
    const auto& layers = net.layers();
    const auto& shapes = net.shapes();
    const auto& acts = cache.activations[ex];
    if (dlogits.size() != net.num_classes())
        throw ShapeError("dloss/dlogits has " + std::to_string(dlogits.size()) + " entries, expected " +
                         std::to_string(net.num_classes()));
    std::vector<double> upstream(dlogits.begin(), dlogits.end());
    std::vector<double> downstream;
    for (std::size_t i = layers.size(); i-- > 0;) {
        const LayerSpec& layer = layers[i];
        const auto& x = acts[i];
        downstream.assign(shapes[i].size(), 0.0);
        switch (layer.kind) {
        case LayerKind::Dense: {
            const auto p = layer_params(net, i);
            auto g = grad.subspan(net.parameter_offset(i), layer.parameter_count());
            dense_backward(p.weights, x, upstream, g.first(layer.weight_count()),
                           g.subspan(layer.weight_count()), downstream);
            break;
        }
        case LayerKind::Conv2D: {
            const auto p = layer_params(net, i);
            auto g = grad.subspan(net.parameter_offset(i), layer.parameter_count());
            conv2d_backward(layer, shapes[i], p.weights, x, upstream, g.first(layer.weight_count()),
                            g.subspan(layer.weight_count()), downstream);
            break;
        }
        case LayerKind::MaxPool2D: maxpool_backward(cache.pool_argmax[ex][i], upstream, downstream); break;
        case LayerKind::ReLU: relu_backward(x, upstream, downstream); break;
        case LayerKind::Flatten: downstream = upstream; break;
        }
        upstream.swap(downstream);
    }
    return upstream;
}

} // namespace

ForwardPass forward(const Network& net, const Inputs& batch) {
    const auto& layers = net.layers();
    const auto& shapes = net.shapes();
    ForwardPass pass;
    pass.cache.network = &net;
    pass.cache.revision = net.revision();
    pass.cache.activations.resize(batch.size());
    pass.cache.pool_argmax.resize(batch.size());
    pass.logits.reserve(batch.size());
    for (std::size_t ex = 0; ex < batch.size(); ++ex) {
        if (batch[ex].size() != net.input_shape().size())
            throw ShapeError("example " + std::to_string(ex) + " has " + std::to_string(batch[ex].size()) +
                             " features, network expects " + net.input_shape().to_string());
        auto& acts = pass.cache.activations[ex];
        auto& argmax = pass.cache.pool_argmax[ex];
        acts.reserve(layers.size() + 1);
        argmax.resize(layers.size());
        acts.emplace_back(batch[ex].begin(), batch[ex].end());
        for (std::size_t i = 0; i < layers.size(); ++i) {
            const LayerSpec& layer = layers[i];
            std::vector<double> y(shapes[i + 1].size());
            const auto& x = acts.back();
            switch (layer.kind) {
            case LayerKind::Dense: {
                const auto p = layer_params(net, i);
                dense_forward(p.weights, p.bias, x, y);
                break;
            }
            case LayerKind::Conv2D: {
                const auto p = layer_params(net, i);
                conv2d_forward(layer, shapes[i], p.weights, p.bias, x, y);
                break;
            }
            case LayerKind::MaxPool2D:
                argmax[i].resize(y.size());
                maxpool_forward(shapes[i], x, y, argmax[i]);
                break;
            case LayerKind::ReLU: relu_forward(x, y); break;
            case LayerKind::Flatten: y = x; break;
            }
            acts.push_back(std::move(y));
        }
        pass.logits.push_back(acts.back());
    }
    return pass;
}

GradientVector backward(const Network& net, const ForwardCache& cache,
                        std::span<const std::vector<double>> dlogits) {
    check_cache(net, cache);
    if (dlogits.size() != cache.batch_size())
        throw ShapeError("got " + std::to_string(dlogits.size()) + " loss gradients for a batch of " +
                         std::to_string(cache.batch_size()));
    GradientVector total(net.parameter_count(), 0.0);
    GradientVector scratch(net.parameter_count());
    for (std::size_t ex = 0; ex < cache.batch_size(); ++ex) {
        std::fill(scratch.begin(), scratch.end(), 0.0);
        backward_example(net, cache, ex, dlogits[ex], scratch);
        for (std::size_t j = 0; j < total.size(); ++j) total[j] += scratch[j];
    }
    return total;
}

std::vector<double> input_gradient(const Network& net, const ForwardCache& cache, std::size_t example,
                                   std::span<const double> dlogits) {
    check_cache(net, cache);
    if (example >= cache.batch_size()) throw std::out_of_range("example index outside cached batch");
    GradientVector scratch(net.parameter_count(), 0.0);
    return backward_example(net, cache, example, dlogits, scratch);
}

void require_finite(std::span<const double> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw DivergenceError(std::string(what) + ": non-finite value at index " + std::to_string(i));
    }
}

} // namespace persist::nn
