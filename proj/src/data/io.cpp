#include "persist/data/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "persist/errors.hpp"

namespace persist::data {

namespace {

DataError parse_error(const std::filesystem::path& path, std::size_t line, const std::string& what) {
    return DataError(path.string() + ":" + std::to_string(line) + ": " + what);
}

int resolve_classes(std::optional<int> requested, const std::vector<int>& labels, const std::filesystem::path& path) {
    const int max_label = *std::max_element(labels.begin(), labels.end());
    if (!requested) return std::max(2, max_label + 1);
    if (*requested < 2) throw DataError(path.string() + ": number of classes must be >= 2");
    return *requested;
}

} // namespace

Dataset load_csv(const std::filesystem::path& path, std::optional<int> num_classes) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open CSV dataset " + path.string());

    std::vector<double> features;
    std::vector<int> labels;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;

        std::string_view rest(line);
        std::size_t field = 0;
        std::size_t row_dim = 0;
        while (true) {
            const std::size_t comma = rest.find(',');
            std::string_view cell = rest.substr(0, comma);
            while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
            while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
            const char* first = cell.data();
            const char* last = cell.data() + cell.size();
            if (field == 0) {
                int label = 0;
                const auto [ptr, ec] = std::from_chars(first, last, label);
                if (ec != std::errc() || ptr != last || cell.empty() || label < 0)
                    throw parse_error(path, line_no, "label '" + std::string(cell) + "' is not a nonnegative integer");
                if (num_classes && label >= *num_classes)
                    throw parse_error(path, line_no, "label " + std::to_string(label) + " >= number of classes " +
                                                         std::to_string(*num_classes));
                labels.push_back(label);
            } else {
                double value = 0.0;
                const auto [ptr, ec] = std::from_chars(first, last, value);
                if (ec != std::errc() || ptr != last || cell.empty())
                    throw parse_error(path, line_no, "feature " + std::to_string(field) + " '" + std::string(cell) +
                                                         "' is not a number");
                features.push_back(value);
                ++row_dim;
            }
            ++field;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (row_dim == 0) throw parse_error(path, line_no, "row has a label but no features");
        if (dim == 0) dim = row_dim;
        if (row_dim != dim)
            throw parse_error(path, line_no, "row has " + std::to_string(row_dim) + " features, expected " +
                                                 std::to_string(dim));
    }
    if (labels.empty()) throw DataError(path.string() + ": CSV dataset contains no examples");
    const int classes = resolve_classes(num_classes, labels, path);
    return Dataset(std::move(features), std::move(labels), nn::Shape::flat(dim), classes);
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write CSV dataset " + path.string());
    char buf[32];
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out << dataset.label(i);
        for (double v : dataset.features(i)) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw DataError("failed writing CSV dataset " + path.string());
}

namespace {

std::vector<unsigned char> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open IDX file " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset, const std::filesystem::path& path) {
    if (offset + 4 > bytes.size())
        throw DataError(path.string() + ": truncated IDX header at byte " + std::to_string(offset));
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

} // namespace

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 std::optional<int> num_classes) {
    const auto img = read_bytes(images);
    const auto lbl = read_bytes(labels);

    const std::uint32_t img_magic = read_be32(img, 0, images);
    if (img_magic != 0x00000803)
        throw DataError(images.string() + ": bad IDX image magic 0x" + [&] {
            char buf[16];
            std::snprintf(buf, sizeof buf, "%08x", img_magic);
            return std::string(buf);
        }() + ", expected 0x00000803");
    const std::uint32_t lbl_magic = read_be32(lbl, 0, labels);
    if (lbl_magic != 0x00000801) throw DataError(labels.string() + ": bad IDX label magic, expected 0x00000801");

    const std::size_t count = read_be32(img, 4, images);
    const std::size_t rows = read_be32(img, 8, images);
    const std::size_t cols = read_be32(img, 12, images);
    const std::size_t label_count = read_be32(lbl, 4, labels);
    if (count == 0 || rows == 0 || cols == 0) throw DataError(images.string() + ": IDX image file declares no data");
    if (count != label_count)
        throw DataError("IDX image count " + std::to_string(count) + " differs from label count " +
                        std::to_string(label_count));
    const std::size_t pixels = rows * cols;
    if (img.size() != 16 + count * pixels)
        throw DataError(images.string() + ": IDX payload is " + std::to_string(img.size() - 16) + " bytes, expected " +
                        std::to_string(count * pixels));
    if (lbl.size() != 8 + count)
        throw DataError(labels.string() + ": IDX payload is " + std::to_string(lbl.size() - 8) + " bytes, expected " +
                        std::to_string(count));

    std::vector<double> features(count * pixels);
    for (std::size_t i = 0; i < features.size(); ++i) features[i] = img[16 + i] / 255.0;
    std::vector<int> label_values(count);
    for (std::size_t i = 0; i < count; ++i) {
        label_values[i] = lbl[8 + i];
        if (num_classes && label_values[i] >= *num_classes)
            throw DataError(labels.string() + ": label " + std::to_string(label_values[i]) + " of example " +
                            std::to_string(i) + " >= number of classes");
    }
    const int classes = resolve_classes(num_classes, label_values, labels);
    return Dataset(std::move(features), std::move(label_values), nn::Shape{1, rows, cols}, classes);
}

} // namespace persist::data
