#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace persist::nn {

/// Activation tensor shape for a single example, stored channel-major (C, H, W).
/// Flat vectors are {d, 1, 1}.
struct Shape {
    std::size_t channels = 0;
    std::size_t height = 1;
    std::size_t width = 1;

    static Shape flat(std::size_t n) { return {n, 1, 1}; }

    std::size_t size() const { return channels * height * width; }
    bool is_flat() const { return height == 1 && width == 1; }
    std::string to_string() const;

    friend bool operator==(const Shape&, const Shape&) = default;
};

enum class LayerKind { Dense, Conv2D, MaxPool2D, ReLU, Flatten };

/// One layer of a feed-forward stack. Conv2D is a valid (unpadded) convolution
/// with stride 1; MaxPool2D is a 2x2 window with stride 2.
struct LayerSpec {
    LayerKind kind = LayerKind::ReLU;
    std::size_t in_dim = 0;  // Dense
    std::size_t out_dim = 0; // Dense
    std::size_t in_channels = 0;  // Conv2D
    std::size_t out_channels = 0; // Conv2D
    std::size_t kernel_size = 0;  // Conv2D, square

    static LayerSpec dense(std::size_t in, std::size_t out);
    static LayerSpec conv2d(std::size_t in_channels, std::size_t out_channels, std::size_t kernel);
    static LayerSpec max_pool() { return {.kind = LayerKind::MaxPool2D}; }
    static LayerSpec relu() { return {.kind = LayerKind::ReLU}; }
    static LayerSpec flatten() { return {.kind = LayerKind::Flatten}; }

    std::size_t weight_count() const;
    std::size_t bias_count() const;
    std::size_t parameter_count() const { return weight_count() + bias_count(); }
    /// Inputs feeding each output unit; sets the init bound 1/sqrt(fan_in).
    std::size_t fan_in() const;
    std::string describe() const;

    friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Shape produced by `layer` on `input`; throws ShapeError when they do not fit.
Shape output_shape(const LayerSpec& layer, const Shape& input);

// Per-example kernels. Weights are row-major: Dense [out][in], Conv2D
// [out_c][in_c][k][k]. Backward kernels ACCUMULATE into weight/bias gradients
// and OVERWRITE the input gradient.

void dense_forward(std::span<const double> weights, std::span<const double> bias,
                   std::span<const double> x, std::span<double> y);
void dense_backward(std::span<const double> weights, std::span<const double> x,
                    std::span<const double> dy, std::span<double> dweights,
                    std::span<double> dbias, std::span<double> dx);

void conv2d_forward(const LayerSpec& layer, const Shape& in, std::span<const double> weights,
                    std::span<const double> bias, std::span<const double> x, std::span<double> y);
void conv2d_backward(const LayerSpec& layer, const Shape& in, std::span<const double> weights,
                     std::span<const double> x, std::span<const double> dy,
                     std::span<double> dweights, std::span<double> dbias, std::span<double> dx);

/// `argmax` receives, per output cell, the flat input index of the window
/// maximum; ties go to the first element in row-major order.
void maxpool_forward(const Shape& in, std::span<const double> x, std::span<double> y,
                     std::span<std::size_t> argmax);
void maxpool_backward(std::span<const std::size_t> argmax, std::span<const double> dy,
                      std::span<double> dx);

void relu_forward(std::span<const double> x, std::span<double> y);
/// `x` is the pre-activation; the gradient passes where x > 0.
void relu_backward(std::span<const double> x, std::span<const double> dy, std::span<double> dx);

} // namespace persist::nn
