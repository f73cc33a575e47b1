#pragma once

#include <filesystem>
#include <optional>

#include "persist/data/dataset.hpp"

namespace persist::data {

/// Header-free CSV, one example per row: "label,f1,...,fd". When
/// `num_classes` is omitted it is max(label) + 1 (at least 2). Errors carry
/// the file name and line number.
Dataset load_csv(const std::filesystem::path& path, std::optional<int> num_classes = std::nullopt);

/// Writes `dataset` in load_csv format with 17 significant digits, so a
/// reload is bitwise exact.
void write_csv(const Dataset& dataset, const std::filesystem::path& path);

/// IDX image (magic 0x00000803) and label (0x00000801) files, big-endian
/// dimensions, unsigned-byte payloads. Pixels are scaled to [0, 1]; images
/// become shape (1, rows, cols).
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::optional<int> num_classes = std::nullopt);

} // namespace persist::data
