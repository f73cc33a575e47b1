#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "oracles.hpp"
#include "persist/data/dataset.hpp"
#include "persist/data/io.hpp"
#include "persist/data/schedule.hpp"
#include "persist/errors.hpp"

using namespace persist;
using namespace persist::data;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "persist_test_data";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

void write_bytes(const fs::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void push_be32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<unsigned char>(v >> shift));
}

// Checks the partition and consecutiveness laws on one schedule.
void check_schedule(const EpochSchedule& s, std::size_t n, const PersistencyPolicy& policy) {
    const auto k = static_cast<std::size_t>(policy.persistency);
    const std::size_t batches = (n + policy.batch_size - 1) / policy.batch_size;
    REQUIRE(s.entries.size() == k * batches);
    std::vector<std::size_t> evaluations(n, 0);
    std::set<std::size_t> ids;
    for (std::size_t pos = 0; pos < s.entries.size(); ++pos) {
        const auto& e = s.entries[pos];
        CHECK(e.minibatch_id == pos / k);
        CHECK(e.reuse_index == static_cast<int>(pos % k) + 1);
        CHECK(e.count <= policy.batch_size);
        CHECK(e.count >= 1);
        for (std::size_t i : s.example_indices(e)) ++evaluations[i];
        if (e.reuse_index > 1) {
            const auto& prev = s.entries[pos - 1];
            CHECK(prev.begin == e.begin);
            CHECK(prev.count == e.count);
        }
        ids.insert(e.minibatch_id);
    }
    CHECK(ids.size() == batches);
    for (std::size_t c : evaluations) CHECK(c == k);
}

} // namespace

TEST_CASE("schedule: N=4, m=2, K=1") {
    const auto s = make_epoch_schedule(4, {1, 2, true}, 0, 9);
    REQUIRE(s.entries.size() == 2);
    std::set<std::size_t> all;
    for (const auto& e : s.entries) {
        CHECK(e.reuse_index == 1);
        for (auto i : s.example_indices(e)) all.insert(i);
    }
    CHECK(all == std::set<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("schedule: N=4, m=2, K=3") {
    const auto s = make_epoch_schedule(4, {3, 2, true}, 0, 9);
    REQUIRE(s.entries.size() == 6);
    const std::vector<std::pair<std::size_t, int>> expected{{0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(s.entries[i].minibatch_id == expected[i].first);
        CHECK(s.entries[i].reuse_index == expected[i].second);
    }
}

TEST_CASE("schedule: N=5, m=2, K=2 keeps the short remainder") {
    const PersistencyPolicy policy{2, 2, true};
    const auto s = make_epoch_schedule(5, policy, 3, 1);
    CHECK(s.num_minibatches == 3);
    CHECK(s.entries.size() == 6);
    std::vector<std::size_t> sizes;
    for (const auto& e : s.entries)
        if (e.reuse_index == 1) sizes.push_back(e.count);
    CHECK(sizes == std::vector<std::size_t>{2, 2, 1});
    check_schedule(s, 5, policy);
}

TEST_CASE("schedule laws over random (N, m, K)") {
    persist::SplitMix64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(300);
        const PersistencyPolicy policy{1 + static_cast<int>(rng.below(6)), 1 + rng.below(n + 20), rng.below(2) == 0};
        check_schedule(make_epoch_schedule(n, policy, rng.below(50), rng.next_u64()), n, policy);
    }
}

TEST_CASE("schedule: m > N yields one minibatch of everything") {
    const auto s = make_epoch_schedule(7, {2, 100, true}, 0, 0);
    CHECK(s.num_minibatches == 1);
    CHECK(s.entries.size() == 2);
    CHECK(s.entries[0].count == 7);
}

TEST_CASE("schedule: K=1 equals the disposable-minibatch partition") {
    for (std::uint64_t epoch = 0; epoch < 5; ++epoch) {
        const auto standard = standard_minibatches(103, 10, true, epoch, 77);
        const auto s = make_epoch_schedule(103, {1, 10, true}, epoch, 77);
        REQUIRE(s.entries.size() == standard.size());
        for (std::size_t b = 0; b < standard.size(); ++b) {
            const auto idx = s.example_indices(s.entries[b]);
            CHECK(std::vector<std::size_t>(idx.begin(), idx.end()) == standard[b]);
        }
    }
}

TEST_CASE("schedule: reshuffling depends on the epoch only when enabled") {
    const auto a0 = make_epoch_schedule(50, {2, 8, true}, 0, 5).order;
    const auto a1 = make_epoch_schedule(50, {2, 8, true}, 1, 5).order;
    const auto b0 = make_epoch_schedule(50, {2, 8, false}, 0, 5).order;
    const auto b1 = make_epoch_schedule(50, {2, 8, false}, 1, 5).order;
    CHECK(a0 != a1);
    CHECK(b0 == b1);
    CHECK(make_epoch_schedule(50, {2, 8, true}, 1, 5).order == a1);
    CHECK(make_epoch_schedule(50, {2, 8, true}, 1, 6).order != a1);
}

TEST_CASE("schedule: invalid policies") {
    CHECK_THROWS_AS(make_epoch_schedule(5, {0, 2, true}, 0, 0), ConfigError);
    CHECK_THROWS_AS(make_epoch_schedule(5, {1, 0, true}, 0, 0), ConfigError);
    CHECK_THROWS_AS(make_epoch_schedule(0, {1, 1, true}, 0, 0), ConfigError);
}

TEST_CASE("blobs: degenerate spread is perfectly separable") {
    const auto ds = generate_blobs({.num_classes = 7, .per_class = 20, .input_dim = 3, .spread = 1e-9, .seed = 1});
    CHECK(ds.size() == 140);
    CHECK(oracle::nearest_center_accuracy(ds) == 1.0);
}

TEST_CASE("blobs: deterministic in the seed") {
    const BlobsConfig cfg{.num_classes = 10, .per_class = 100, .input_dim = 20, .spread = 1.0, .seed = 3};
    CHECK(generate_blobs(cfg) == generate_blobs(cfg));
    auto other = cfg;
    other.seed = 4;
    CHECK_FALSE(generate_blobs(cfg) == generate_blobs(other));
}

TEST_CASE("blobs: large spread defeats the nearest-centre classifier") {
    // Centres for C=2 are e0 and e1, separation sqrt(2); spread is 10x that.
    const auto ds = generate_blobs(
        {.num_classes = 2, .per_class = 500, .input_dim = 4, .spread = 10.0 * std::sqrt(2.0), .seed = 11});
    CHECK(oracle::nearest_center_accuracy(ds) < 0.9);
}

TEST_CASE("blobs: invalid parameters") {
    CHECK_THROWS_AS(generate_blobs({.num_classes = 1}), ConfigError);
    CHECK_THROWS_AS(generate_blobs({.spread = 0.0}), ConfigError);
}

TEST_CASE("csv: single row") {
    const auto path = temp_file("one.csv");
    write_text(path, "1,0.5,0.25\n");
    const auto ds = load_csv(path, 2);
    REQUIRE(ds.size() == 1);
    CHECK(ds.label(0) == 1);
    CHECK(std::vector<double>(ds.features(0).begin(), ds.features(0).end()) == std::vector<double>{0.5, 0.25});
}

TEST_CASE("csv: errors carry the line number") {
    const auto path = temp_file("bad.csv");
    auto message = [&](const std::string& text, std::optional<int> classes = std::nullopt) {
        write_text(path, text);
        try {
            load_csv(path, classes);
        } catch (const DataError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("").find("no examples") != std::string::npos);
    CHECK(message("0,1,2\n1,3\n").find(":2:") != std::string::npos);
    CHECK(message("0,1,2\n1,3,x\n").find(":2:") != std::string::npos);
    CHECK(message("0,1\n-1,2\n").find(":2:") != std::string::npos);
    CHECK(message("0,1\n1,2\n2,3\n", 2).find(":3:") != std::string::npos);
    CHECK(message("0\n").find(":1:") != std::string::npos);
    CHECK_THROWS_AS(load_csv(temp_file("does_not_exist.csv")), DataError);
}

TEST_CASE("csv: round trip is bitwise exact") {
    const auto ds = generate_blobs({.num_classes = 3, .per_class = 40, .input_dim = 5, .spread = 0.7, .seed = 8});
    const auto path = temp_file("roundtrip.csv");
    write_csv(ds, path);
    CHECK(load_csv(path, 3) == ds);
}

TEST_CASE("idx: images and labels") {
    std::vector<unsigned char> img, lbl;
    push_be32(img, 0x00000803);
    push_be32(img, 2);
    push_be32(img, 2);
    push_be32(img, 3);
    for (int i = 0; i < 12; ++i) img.push_back(static_cast<unsigned char>(i * 20));
    push_be32(lbl, 0x00000801);
    push_be32(lbl, 2);
    lbl.push_back(7);
    lbl.push_back(3);
    write_bytes(temp_file("img.idx"), img);
    write_bytes(temp_file("lbl.idx"), lbl);
    const auto ds = load_idx(temp_file("img.idx"), temp_file("lbl.idx"));
    CHECK(ds.size() == 2);
    CHECK(ds.shape() == nn::Shape{1, 2, 3});
    CHECK(ds.num_classes() == 8);
    CHECK(ds.label(0) == 7);
    CHECK(ds.features(1)[0] == 120.0 / 255.0);
    CHECK(ds.features(1)[5] == 220.0 / 255.0);

    auto bad = img;
    bad[3] = 0x01;
    write_bytes(temp_file("bad_img.idx"), bad);
    CHECK_THROWS_AS(load_idx(temp_file("bad_img.idx"), temp_file("lbl.idx")), DataError);
    img.pop_back();
    write_bytes(temp_file("short_img.idx"), img);
    CHECK_THROWS_AS(load_idx(temp_file("short_img.idx"), temp_file("lbl.idx")), DataError);
    CHECK_THROWS_AS(load_idx(temp_file("img.idx"), temp_file("lbl.idx"), 5), DataError);
}

TEST_CASE("split: sizes, disjointness, determinism and label counts") {
    std::vector<double> f(10);
    std::vector<int> labels(10);
    for (int i = 0; i < 10; ++i) {
        f[i] = i;
        labels[i] = i % 3;
    }
    const Dataset ds(f, labels, nn::Shape::flat(1), 3);
    const auto [train, test] = split(ds, 0.8, 1);
    CHECK(train.size() == 8);
    CHECK(test.size() == 2);
    std::set<double> seen;
    for (std::size_t i = 0; i < train.size(); ++i) seen.insert(train.features(i)[0]);
    for (std::size_t i = 0; i < test.size(); ++i) seen.insert(test.features(i)[0]);
    CHECK(seen.size() == 10);

    const auto again = split(ds, 0.8, 1);
    CHECK(again.first == train);
    CHECK(again.second == test);

    auto hist = label_histogram(train);
    const auto test_hist = label_histogram(test);
    for (std::size_t c = 0; c < hist.size(); ++c) hist[c] += test_hist[c];
    CHECK(hist == label_histogram(ds));

    CHECK_THROWS_AS(split(ds, 0.01, 1), ConfigError);
    CHECK_THROWS_AS(split(ds, 1.0, 1), ConfigError);
}

TEST_CASE("dataset validation") {
    CHECK_THROWS_AS(Dataset({}, {}, nn::Shape::flat(1), 2), DataError);
    CHECK_THROWS_AS(Dataset({1.0}, {2}, nn::Shape::flat(1), 2), DataError);
    CHECK_THROWS_AS(Dataset({1.0, 2.0}, {0}, nn::Shape::flat(1), 2), DataError);
}
