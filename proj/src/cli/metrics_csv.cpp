#include "persist/cli/metrics_csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "persist/errors.hpp"

namespace persist::cli {

namespace {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
T parse_cell(std::string_view cell, const std::filesystem::path& path, std::size_t line, std::string_view column) {
    T value{};
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size())
        throw DataError(path.string() + ":" + std::to_string(line) + ": bad " + std::string(column) + " value '" +
                        std::string(cell) + "'");
    return value;
}

} // namespace

void write_metrics_csv(std::ostream& out, const std::vector<train::MetricsRecord>& records) {
    out << kMetricsHeader << '\n';
    for (const auto& r : records) {
        out << r.epoch << ',' << fmt17(r.wall_clock_s) << ',' << fmt17(r.train_loss) << ',' << fmt17(r.test_loss)
            << ',' << fmt17(r.test_acc) << ',' << r.updates << ',' << r.minibatch_loads << ','
            << fmt17(r.effective_lr_last) << '\n';
    }
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<train::MetricsRecord>& records) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write metrics file " + path.string());
    write_metrics_csv(out, records);
    if (!out) throw DataError("failed writing metrics file " + path.string());
}

std::vector<train::MetricsRecord> read_metrics_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open metrics file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ":1: empty metrics file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kMetricsHeader) throw DataError(path.string() + ":1: unexpected metrics header");

    std::vector<train::MetricsRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> cells;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            cells.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (cells.size() != 8)
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 8 columns, found " +
                            std::to_string(cells.size()));
        train::MetricsRecord r;
        r.epoch = parse_cell<int>(cells[0], path, line_no, "epoch");
        r.wall_clock_s = parse_cell<double>(cells[1], path, line_no, "wall_clock_s");
        r.train_loss = parse_cell<double>(cells[2], path, line_no, "train_loss");
        r.test_loss = parse_cell<double>(cells[3], path, line_no, "test_loss");
        r.test_acc = parse_cell<double>(cells[4], path, line_no, "test_acc");
        r.updates = parse_cell<std::uint64_t>(cells[5], path, line_no, "updates");
        r.minibatch_loads = parse_cell<std::uint64_t>(cells[6], path, line_no, "minibatch_loads");
        r.effective_lr_last = parse_cell<double>(cells[7], path, line_no, "effective_lr_last");
        records.push_back(r);
    }
    return records;
}

} // namespace persist::cli
