#include "persist/nn/layers.hpp"

#include <algorithm>
#include <cassert>
#include <string>

#include "persist/errors.hpp"

namespace persist::nn {

std::string Shape::to_string() const {
    return std::to_string(channels) + "x" + std::to_string(height) + "x" + std::to_string(width);
}

LayerSpec LayerSpec::dense(std::size_t in, std::size_t out) {
    return {.kind = LayerKind::Dense, .in_dim = in, .out_dim = out};
}

LayerSpec LayerSpec::conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel) {
    return {.kind = LayerKind::Conv2D,
            .in_channels = in_channels,
            .out_channels = out_channels,
            .kernel_size = kernel};
}

std::size_t LayerSpec::weight_count() const {
    switch (kind) {
    case LayerKind::Dense: return in_dim * out_dim;
    case LayerKind::Conv2D: return out_channels * in_channels * kernel_size * kernel_size;
    default: return 0;
    }
}

std::size_t LayerSpec::bias_count() const {
    switch (kind) {
    case LayerKind::Dense: return out_dim;
    case LayerKind::Conv2D: return out_channels;
    default: return 0;
    }
}

std::size_t LayerSpec::fan_in() const {
    switch (kind) {
    case LayerKind::Dense: return in_dim;
    case LayerKind::Conv2D: return in_channels * kernel_size * kernel_size;
    default: return 0;
    }
}

std::string LayerSpec::describe() const {
    switch (kind) {
    case LayerKind::Dense: return "Dense(" + std::to_string(in_dim) + "->" + std::to_string(out_dim) + ")";
    case LayerKind::Conv2D:
        return "Conv2D(" + std::to_string(in_channels) + "->" + std::to_string(out_channels) + ", k=" +
               std::to_string(kernel_size) + ")";
    case LayerKind::MaxPool2D: return "MaxPool2D(2x2)";
    case LayerKind::ReLU: return "ReLU";
    case LayerKind::Flatten: return "Flatten";
    }
    return "?";
}

Shape output_shape(const LayerSpec& layer, const Shape& input) {
    auto fail = [&](const std::string& why) {
        return ShapeError(layer.describe() + " cannot take input " + input.to_string() + ": " + why);
    };
    switch (layer.kind) {
    case LayerKind::Dense:
        if (layer.in_dim == 0 || layer.out_dim == 0) throw fail("zero-sized dense layer");
        if (!input.is_flat()) throw fail("dense input must be flat (insert a flatten layer)");
        if (input.size() != layer.in_dim) throw fail("expected " + std::to_string(layer.in_dim) + " inputs");
        return Shape::flat(layer.out_dim);
    case LayerKind::Conv2D:
        if (layer.in_channels == 0 || layer.out_channels == 0 || layer.kernel_size == 0)
            throw fail("zero-sized convolution");
        if (input.channels != layer.in_channels)
            throw fail("expected " + std::to_string(layer.in_channels) + " channels");
        if (layer.kernel_size > input.height || layer.kernel_size > input.width)
            throw fail("kernel larger than input");
        return {layer.out_channels, input.height - layer.kernel_size + 1, input.width - layer.kernel_size + 1};
    case LayerKind::MaxPool2D:
        if (input.height < 2 || input.width < 2) throw fail("pooling window larger than input");
        return {input.channels, input.height / 2, input.width / 2};
    case LayerKind::ReLU: return input;
    case LayerKind::Flatten: return Shape::flat(input.size());
    }
    throw fail("unknown layer kind");
}

void dense_forward(std::span<const double> weights, std::span<const double> bias,
                   std::span<const double> x, std::span<double> y) {
    const std::size_t in = x.size();
    const std::size_t out = y.size();
    assert(weights.size() == in * out && bias.size() == out);
    for (std::size_t o = 0; o < out; ++o) {
        const double* row = weights.data() + o * in;
        double acc = bias[o];
        for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
        y[o] = acc;
    }
}

void dense_backward(std::span<const double> weights, std::span<const double> x,
                    std::span<const double> dy, std::span<double> dweights,
                    std::span<double> dbias, std::span<double> dx) {
    const std::size_t in = x.size();
    const std::size_t out = dy.size();
    std::fill(dx.begin(), dx.end(), 0.0);
    for (std::size_t o = 0; o < out; ++o) {
        const double g = dy[o];
        dbias[o] += g;
        const double* row = weights.data() + o * in;
        double* drow = dweights.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) {
            drow[i] += g * x[i];
            dx[i] += g * row[i];
        }
    }
}

void conv2d_forward(const LayerSpec& layer, const Shape& in, std::span<const double> weights,
                    std::span<const double> bias, std::span<const double> x, std::span<double> y) {
    const Shape out = output_shape(layer, in);
    const std::size_t k = layer.kernel_size;
    for (std::size_t oc = 0; oc < out.channels; ++oc) {
        for (std::size_t r = 0; r < out.height; ++r) {
            for (std::size_t c = 0; c < out.width; ++c) {
                double acc = bias[oc];
                for (std::size_t ic = 0; ic < in.channels; ++ic) {
                    const double* w = weights.data() + ((oc * in.channels + ic) * k) * k;
                    const double* plane = x.data() + ic * in.height * in.width;
                    for (std::size_t kr = 0; kr < k; ++kr) {
                        const double* src = plane + (r + kr) * in.width + c;
                        for (std::size_t kc = 0; kc < k; ++kc) acc += w[kr * k + kc] * src[kc];
                    }
                }
                y[(oc * out.height + r) * out.width + c] = acc;
            }
        }
    }
}

void conv2d_backward(const LayerSpec& layer, const Shape& in, std::span<const double> weights,
                     std::span<const double> x, std::span<const double> dy,
                     std::span<double> dweights, std::span<double> dbias, std::span<double> dx) {
    const Shape out = output_shape(layer, in);
    const std::size_t k = layer.kernel_size;
    std::fill(dx.begin(), dx.end(), 0.0);
    for (std::size_t oc = 0; oc < out.channels; ++oc) {
        for (std::size_t r = 0; r < out.height; ++r) {
            for (std::size_t c = 0; c < out.width; ++c) {
                const double g = dy[(oc * out.height + r) * out.width + c];
                dbias[oc] += g;
                for (std::size_t ic = 0; ic < in.channels; ++ic) {
                    const std::size_t wbase = ((oc * in.channels + ic) * k) * k;
                    const std::size_t xbase = ic * in.height * in.width;
                    for (std::size_t kr = 0; kr < k; ++kr) {
                        for (std::size_t kc = 0; kc < k; ++kc) {
                            const std::size_t xi = xbase + (r + kr) * in.width + c + kc;
                            dweights[wbase + kr * k + kc] += g * x[xi];
                            dx[xi] += g * weights[wbase + kr * k + kc];
                        }
                    }
                }
            }
        }
    }
}

void maxpool_forward(const Shape& in, std::span<const double> x, std::span<double> y,
                     std::span<std::size_t> argmax) {
    const std::size_t oh = in.height / 2;
    const std::size_t ow = in.width / 2;
    for (std::size_t ch = 0; ch < in.channels; ++ch) {
        for (std::size_t r = 0; r < oh; ++r) {
            for (std::size_t c = 0; c < ow; ++c) {
                std::size_t best = (ch * in.height + 2 * r) * in.width + 2 * c;
                for (std::size_t dr = 0; dr < 2; ++dr) {
                    for (std::size_t dc = 0; dc < 2; ++dc) {
                        const std::size_t idx = (ch * in.height + 2 * r + dr) * in.width + 2 * c + dc;
                        if (x[idx] > x[best]) best = idx;
                    }
                }
                const std::size_t o = (ch * oh + r) * ow + c;
                y[o] = x[best];
                argmax[o] = best;
            }
        }
    }
}

void maxpool_backward(std::span<const std::size_t> argmax, std::span<const double> dy,
                      std::span<double> dx) {
    std::fill(dx.begin(), dx.end(), 0.0);
    for (std::size_t o = 0; o < dy.size(); ++o) dx[argmax[o]] += dy[o];
}

void relu_forward(std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward(std::span<const double> x, std::span<const double> dy, std::span<double> dx) {
    for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > 0.0 ? dy[i] : 0.0;
}

} // namespace persist::nn
