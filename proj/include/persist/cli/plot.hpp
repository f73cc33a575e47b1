#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "persist/trainer/trainer.hpp"

namespace persist::cli {

struct Series {
    std::string label;
    std::vector<train::MetricsRecord> records;
};

/// Legend label for a metrics file named like metrics_m256_K5[_adaptive].csv;
/// falls back to the file stem.
std::string series_label(const std::filesystem::path& csv);

/// Self-contained SVG with a 2x2 grid: test accuracy (top) and test loss
/// (bottom) against wall-clock seconds (left) and epochs (right). Each
/// series is one <polyline> per panel.
std::string render_figure(const std::vector<Series>& series);

} // namespace persist::cli
