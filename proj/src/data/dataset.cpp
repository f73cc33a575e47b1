#include "persist/data/dataset.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "persist/errors.hpp"
#include "persist/rng.hpp"

namespace persist::data {

Dataset::Dataset(std::vector<double> features, std::vector<int> labels, nn::Shape shape, int num_classes)
    : features_(std::move(features)), labels_(std::move(labels)), shape_(shape), num_classes_(num_classes) {
    if (labels_.empty()) throw DataError("dataset has no examples");
    if (num_classes_ < 2) throw DataError("dataset needs at least two classes");
    if (shape_.size() == 0) throw DataError("dataset feature shape is empty");
    if (features_.size() != labels_.size() * shape_.size())
        throw DataError("dataset holds " + std::to_string(features_.size()) + " feature values, expected " +
                        std::to_string(labels_.size()) + " x " + std::to_string(shape_.size()));
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] < 0 || labels_[i] >= num_classes_)
            throw DataError("example " + std::to_string(i) + " has label " + std::to_string(labels_[i]) +
                            " outside [0, " + std::to_string(num_classes_) + ")");
    }
}

nn::Inputs Dataset::gather(std::span<const std::size_t> indices) const {
    nn::Inputs out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(features(i));
    return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<double> features;
    std::vector<int> labels;
    features.reserve(indices.size() * shape_.size());
    labels.reserve(indices.size());
    for (std::size_t i : indices) {
        const auto f = this->features(i);
        features.insert(features.end(), f.begin(), f.end());
        labels.push_back(labels_[i]);
    }
    return Dataset(std::move(features), std::move(labels), shape_, num_classes_);
}

std::vector<std::size_t> label_histogram(const Dataset& dataset) {
    std::vector<std::size_t> hist(static_cast<std::size_t>(dataset.num_classes()), 0);
    for (int label : dataset.labels()) ++hist[static_cast<std::size_t>(label)];
    return hist;
}

std::vector<double> blob_center(int label, std::size_t input_dim) {
    std::vector<double> center(input_dim, 0.0);
    const auto c = static_cast<std::size_t>(label);
    center[c % input_dim] = 1.0 + static_cast<double>(c / input_dim);
    return center;
}

Dataset generate_blobs(const BlobsConfig& config) {
    if (config.num_classes < 2) throw ConfigError("blobs need at least two classes");
    if (config.per_class < 1 || config.input_dim < 1) throw ConfigError("blobs need per_class >= 1 and dim >= 1");
    if (!(config.spread > 0.0)) throw ConfigError("blob spread must be positive");

    SplitMix64 rng(derive_seed(config.seed, streams::kBlobs));
    const std::size_t n = static_cast<std::size_t>(config.num_classes) * config.per_class;
    std::vector<double> features;
    std::vector<int> labels;
    features.reserve(n * config.input_dim);
    labels.reserve(n);
    for (int c = 0; c < config.num_classes; ++c) {
        const auto center = blob_center(c, config.input_dim);
        for (std::size_t j = 0; j < config.per_class; ++j) {
            for (double mu : center) features.push_back(mu + config.spread * rng.normal());
            labels.push_back(c);
        }
    }
    return Dataset(std::move(features), std::move(labels), nn::Shape::flat(config.input_dim), config.num_classes);
}

std::pair<Dataset, Dataset> split(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("train fraction must lie in (0, 1), got " + std::to_string(train_fraction));
    const std::size_t n = dataset.size();
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n)
        throw ConfigError("split of " + std::to_string(n) + " examples at fraction " + std::to_string(train_fraction) +
                          " leaves one side empty");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(derive_seed(seed, streams::kSplit));
    shuffle(order, rng);
    const std::span<const std::size_t> all(order);
    return {dataset.subset(all.first(n_train)), dataset.subset(all.subspan(n_train))};
}

} // namespace persist::data
