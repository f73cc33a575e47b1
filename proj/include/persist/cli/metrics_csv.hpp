#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "persist/trainer/trainer.hpp"

namespace persist::cli {

inline constexpr std::string_view kMetricsHeader =
    "epoch,wall_clock_s,train_loss,test_loss,test_acc,updates,minibatch_loads,effective_lr_last";

/// Floats use 17 significant digits so read_metrics_csv restores them exactly.
void write_metrics_csv(std::ostream& out, const std::vector<train::MetricsRecord>& records);
void write_metrics_csv(const std::filesystem::path& path, const std::vector<train::MetricsRecord>& records);

/// Throws DataError naming the file and line on any malformed content.
std::vector<train::MetricsRecord> read_metrics_csv(const std::filesystem::path& path);

} // namespace persist::cli
