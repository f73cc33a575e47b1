#pragma once

#include <filesystem>
#include <string>
#include <utility>

#include <json.hpp>

#include "persist/data/dataset.hpp"
#include "persist/trainer/trainer.hpp"

namespace persist::cli {

inline constexpr const char* kToolVersion = "persist-sgd 0.1.0";

/// Where the data comes from: "blobs[:C,PER_CLASS,DIM,SPREAD]", "csv:PATH"
/// or "idx:IMAGES,LABELS". File sources are split into train/test.
struct DatasetSource {
    std::string descriptor = "blobs";
    double train_fraction = 0.8;

    static DatasetSource parse(const std::string& descriptor, double train_fraction);
    /// Loads and splits; the seed drives blob sampling and the split.
    std::pair<data::Dataset, data::Dataset> load(std::uint64_t seed) const;
};

/// Blob settings used when the descriptor is plain "blobs".
data::BlobsConfig default_blobs();

struct RunManifest {
    train::ExperimentConfig config;
    DatasetSource source;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    int num_classes = 0;
    nn::Shape input_shape;
    std::string metrics_csv; // file name, relative to the manifest's directory
    std::string manifest;    // file name
    std::string tool_version = kToolVersion;
};

nlohmann::json to_json(const RunManifest& manifest);
/// Throws DataError on missing or ill-typed fields.
RunManifest manifest_from_json(const nlohmann::json& j);

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest read_manifest(const std::filesystem::path& path);

} // namespace persist::cli
