#include "persist/cli/manifest.hpp"

#include <charconv>
#include <fstream>

#include "persist/data/io.hpp"
#include "persist/errors.hpp"
#include "persist/nn/arch.hpp"
#include "persist/rng.hpp"

namespace persist::cli {

using nlohmann::json;

data::BlobsConfig default_blobs() {
    // 500 per class x 10 classes = 5000 training examples in 32 dimensions.
    return {.num_classes = 10, .per_class = 500, .input_dim = 32, .spread = 0.3, .seed = 0};
}

namespace {

template <typename T>
T parse_number(std::string_view text, const std::string& descriptor) {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("bad number '" + std::string(text) + "' in dataset descriptor '" + descriptor + "'");
    return value;
}

std::vector<std::string_view> split_commas(std::string_view text) {
    std::vector<std::string_view> parts;
    for (;;) {
        const auto comma = text.find(',');
        parts.push_back(text.substr(0, comma));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return parts;
}

data::BlobsConfig blobs_from_descriptor(const std::string& descriptor) {
    auto cfg = default_blobs();
    if (descriptor == "blobs") return cfg;
    const auto parts = split_commas(std::string_view(descriptor).substr(6));
    if (parts.size() != 4)
        throw ConfigError("blobs descriptor must be 'blobs' or 'blobs:CLASSES,PER_CLASS,DIM,SPREAD', got '" +
                          descriptor + "'");
    cfg.num_classes = parse_number<int>(parts[0], descriptor);
    cfg.per_class = parse_number<std::size_t>(parts[1], descriptor);
    cfg.input_dim = parse_number<std::size_t>(parts[2], descriptor);
    cfg.spread = parse_number<double>(parts[3], descriptor);
    return cfg;
}

} // namespace

DatasetSource DatasetSource::parse(const std::string& descriptor, double train_fraction) {
    const bool known = descriptor == "blobs" || descriptor.starts_with("blobs:") || descriptor.starts_with("csv:") ||
                       descriptor.starts_with("idx:");
    if (!known) throw ConfigError("unknown dataset '" + descriptor + "' (expected blobs, csv:PATH or idx:IMAGES,LABELS)");
    if (descriptor.starts_with("blobs")) blobs_from_descriptor(descriptor);
    if (descriptor.starts_with("idx:") && split_commas(std::string_view(descriptor).substr(4)).size() != 2)
        throw ConfigError("idx dataset needs two paths: idx:IMAGES,LABELS");
    if (descriptor == "csv:") throw ConfigError("csv dataset needs a path: csv:PATH");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train fraction must lie in (0, 1)");
    return {descriptor, train_fraction};
}

std::pair<data::Dataset, data::Dataset> DatasetSource::load(std::uint64_t seed) const {
    if (descriptor.starts_with("blobs")) {
        // Separate draws from the same clusters; the test set is a fifth the size.
        auto train_cfg = blobs_from_descriptor(descriptor);
        auto test_cfg = train_cfg;
        train_cfg.seed = derive_seed(seed, streams::kBlobs, 1);
        test_cfg.seed = derive_seed(seed, streams::kBlobs, 2);
        test_cfg.per_class = std::max<std::size_t>(1, train_cfg.per_class / 5);
        return {data::generate_blobs(train_cfg), data::generate_blobs(test_cfg)};
    }
    if (descriptor.starts_with("csv:")) {
        return data::split(data::load_csv(descriptor.substr(4)), train_fraction, seed);
    }
    const auto paths = split_commas(std::string_view(descriptor).substr(4));
    return data::split(data::load_idx(std::string(paths[0]), std::string(paths[1])), train_fraction, seed);
}

json to_json(const RunManifest& m) {
    const auto& c = m.config;
    return json{
        {"tool_version", m.tool_version},
        {"config",
         {{"batch_size", c.policy.batch_size},
          {"persistency", c.policy.persistency},
          {"reshuffle_each_epoch", c.policy.reshuffle_each_epoch},
          {"learning_rate", c.optimizer.learning_rate},
          {"momentum", c.optimizer.momentum},
          {"lr_policy", c.optimizer.lr_policy == optim::LrPolicy::AdaptivePersistency ? "adaptive" : "constant"},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"eval_every", c.eval_every},
          {"architecture", nn::format_architecture(c.architecture)}}},
        {"dataset",
         {{"source", m.source.descriptor},
          {"train_fraction", m.source.train_fraction},
          {"train_size", m.train_size},
          {"test_size", m.test_size},
          {"num_classes", m.num_classes},
          {"input_shape", {m.input_shape.channels, m.input_shape.height, m.input_shape.width}}}},
        {"artifacts", {{"metrics_csv", m.metrics_csv}, {"manifest", m.manifest}}},
    };
}

RunManifest manifest_from_json(const json& j) {
    try {
        RunManifest m;
        m.tool_version = j.at("tool_version").get<std::string>();
        const auto& c = j.at("config");
        m.config.policy.batch_size = c.at("batch_size").get<std::size_t>();
        m.config.policy.persistency = c.at("persistency").get<int>();
        m.config.policy.reshuffle_each_epoch = c.at("reshuffle_each_epoch").get<bool>();
        m.config.optimizer.learning_rate = c.at("learning_rate").get<double>();
        m.config.optimizer.momentum = c.at("momentum").get<double>();
        const auto policy = c.at("lr_policy").get<std::string>();
        if (policy != "adaptive" && policy != "constant") throw DataError("unknown lr_policy '" + policy + "'");
        m.config.optimizer.lr_policy =
            policy == "adaptive" ? optim::LrPolicy::AdaptivePersistency : optim::LrPolicy::Constant;
        m.config.epochs = c.at("epochs").get<int>();
        m.config.seed = c.at("seed").get<std::uint64_t>();
        m.config.eval_every = c.at("eval_every").get<int>();

        const auto& d = j.at("dataset");
        m.source = {d.at("source").get<std::string>(), d.at("train_fraction").get<double>()};
        m.train_size = d.at("train_size").get<std::size_t>();
        m.test_size = d.at("test_size").get<std::size_t>();
        m.num_classes = d.at("num_classes").get<int>();
        const auto shape = d.at("input_shape").get<std::vector<std::size_t>>();
        if (shape.size() != 3) throw DataError("input_shape must have three entries");
        m.input_shape = {shape[0], shape[1], shape[2]};
        m.config.architecture = nn::parse_architecture(c.at("architecture").get<std::string>(), m.input_shape,
                                                       static_cast<std::size_t>(m.num_classes));

        const auto& a = j.at("artifacts");
        m.metrics_csv = a.at("metrics_csv").get<std::string>();
        m.manifest = a.at("manifest").get<std::string>();
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed manifest: ") + e.what());
    }
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest " + path.string());
    out << to_json(manifest).dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return manifest_from_json(j);
}

} // namespace persist::cli
