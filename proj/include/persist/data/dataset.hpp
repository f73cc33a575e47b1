#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "persist/nn/layers.hpp"
#include "persist/nn/network.hpp"

namespace persist::data {

/// Immutable labelled examples. Features are stored example-major, each
/// example holding shape.size() values.
class Dataset {
public:
    /// Validates N >= 1, labels in [0, num_classes), num_classes >= 2 and
    /// features.size() == N * shape.size(); throws DataError otherwise.
    Dataset(std::vector<double> features, std::vector<int> labels, nn::Shape shape, int num_classes);

    std::size_t size() const { return labels_.size(); }
    const nn::Shape& shape() const { return shape_; }
    int num_classes() const { return num_classes_; }

    std::span<const double> features(std::size_t i) const {
        return std::span<const double>(features_).subspan(i * shape_.size(), shape_.size());
    }
    int label(std::size_t i) const { return labels_[i]; }
    const std::vector<double>& all_features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }

    /// Views over the chosen examples, in order.
    nn::Inputs gather(std::span<const std::size_t> indices) const;
    /// New dataset holding copies of the chosen examples, in order.
    Dataset subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<double> features_;
    std::vector<int> labels_;
    nn::Shape shape_;
    int num_classes_;
};

/// Count of each label, indexed by class.
std::vector<std::size_t> label_histogram(const Dataset& dataset);

struct BlobsConfig {
    int num_classes = 10;
    std::size_t per_class = 500;
    std::size_t input_dim = 32;
    double spread = 1.0;
    std::uint64_t seed = 0;
};

/// Cluster centre used by generate_blobs for `label`: unit distance along axis
/// (label mod d), scaled by 1 + label / d so labels sharing an axis stay apart.
std::vector<double> blob_center(int label, std::size_t input_dim);

/// Isotropic Gaussian clusters (stddev `spread`) around blob_center(c), one
/// per class, examples ordered class-major. Deterministic in the seed.
Dataset generate_blobs(const BlobsConfig& config);

/// Deterministic shuffled split; throws ConfigError when either side would be empty.
std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

} // namespace persist::data
