#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "asni/data.hpp"
#include "asni/errors.hpp"
#include "test_util.hpp"

using namespace asni;
namespace fs = std::filesystem;

TEST_CASE("idx fixture parses with correct shapes, ranges and scaling") {
    const std::string dir = testutil::write_idx_fixture("parse", 30, 12);
    auto [train, test] = load_mnist(dir);

    CHECK(train.size() == 30);
    CHECK(test.size() == 12);
    CHECK(train.images.shape == std::vector<std::int64_t>{30, 1, 28, 28});
    for (float v : train.images.data) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
    for (auto l : train.labels) {
        CHECK(l >= 0);
        CHECK(l <= 9);
    }
    // Byte 255 scales to exactly 1.0f.
    bool found_extremes = false;
    for (float v : train.images.data) {
        if (v == 1.0f) found_extremes = true;
    }
    CHECK(found_extremes);
}

TEST_CASE("wrong image magic is rejected as bad_magic") {
    const std::string dir = testutil::write_idx_fixture("magic", 4, 2);
    // 0x00000802 instead of 0x00000803.
    std::fstream f(dir + "/train-images-idx3-ubyte",
                   std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(3);
    f.put(0x02);
    f.close();
    try {
        load_mnist(dir);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.kind == DataError::Kind::bad_magic);
    }
}

TEST_CASE("truncated image payload is rejected as truncated") {
    const std::string dir = testutil::write_idx_fixture("trunc", 4, 2);
    fs::resize_file(dir + "/train-images-idx3-ubyte", 16 + 3 * 28 * 28 + 100);
    try {
        load_mnist(dir);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.kind == DataError::Kind::truncated);
    }
}

TEST_CASE("image/label count disagreement is rejected as count_mismatch") {
    const std::string dir = testutil::write_idx_fixture("count", 4, 2);
    // Rewrite the label file with 3 entries instead of 4.
    std::ofstream lab(dir + "/train-labels-idx1-ubyte", std::ios::binary | std::ios::trunc);
    testutil::write_be32(lab, 2049);
    testutil::write_be32(lab, 3);
    lab.put(0);
    lab.put(1);
    lab.put(2);
    lab.close();
    try {
        load_mnist(dir);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.kind == DataError::Kind::count_mismatch);
    }
}

TEST_CASE("missing files surface as io errors") {
    try {
        load_mnist("/nonexistent/path");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.kind == DataError::Kind::io);
    }
}

TEST_CASE("real mnist: 60k/10k split, 1000 batches at B=60") {
    const std::string dir = testutil::mnist_dir();
    if (dir.empty()) {
        MESSAGE("real MNIST not available; skipping");
        return;
    }
    auto [train, test] = load_mnist(dir);
    CHECK(train.size() == 60000);
    CHECK(test.size() == 10000);
    CHECK(train.images.shape == std::vector<std::int64_t>{60000, 1, 28, 28});

    BatchSequence seq = batches(train, BatchPlan{1, 1, 60});
    CHECK(seq.num_batches() == 1000);

    for (auto l : test.labels) {
        CHECK(l >= 0);
        CHECK(l <= 9);
    }
}

TEST_CASE("batch sequence covers every sample once in permutation order") {
    const std::string dir = testutil::write_idx_fixture("batches", 6, 2);
    auto [train, test] = load_mnist(dir);

    const BatchPlan plan{123, 1, 2};
    const auto perm = make_permutation(plan, 6);
    BatchSequence seq = batches(train, plan);
    REQUIRE(seq.num_batches() == 3);

    std::vector<std::int32_t> seen_labels;
    for (std::int64_t b = 0; b < 3; ++b) {
        Batch batch = seq.batch(b);
        CHECK(batch.size() == 2);
        for (int i = 0; i < 2; ++i) {
            const std::int64_t src = perm[static_cast<std::size_t>(b * 2 + i)];
            CHECK(batch.labels[static_cast<std::size_t>(i)] ==
                  train.labels[static_cast<std::size_t>(src)]);
            // Pixels come from the permuted source row.
            const float* expect = train.images.ptr() + src * 28 * 28;
            const float* got = batch.inputs.ptr() + i * 28 * 28;
            CHECK(std::equal(expect, expect + 28 * 28, got));
            seen_labels.push_back(batch.labels[static_cast<std::size_t>(i)]);
        }
    }
    // Permutation is a bijection: all six samples appear exactly once.
    std::vector<std::int32_t> sorted_seen = seen_labels;
    std::sort(sorted_seen.begin(), sorted_seen.end());
    std::vector<std::int32_t> sorted_all = train.labels;
    std::sort(sorted_all.begin(), sorted_all.end());
    CHECK(sorted_seen == sorted_all);
}

TEST_CASE("the trailing remainder is dropped") {
    const std::string dir = testutil::write_idx_fixture("remainder", 7, 2);
    auto [train, test] = load_mnist(dir);
    BatchSequence seq = batches(train, BatchPlan{5, 1, 4});
    CHECK(seq.num_batches() == 1);
}

TEST_CASE("identical (seed, epoch) reproduces batches bit-exactly") {
    const std::string dir = testutil::write_idx_fixture("determinism", 12, 2);
    auto [train, test] = load_mnist(dir);

    BatchSequence a = batches(train, BatchPlan{9, 3, 4});
    BatchSequence b = batches(train, BatchPlan{9, 3, 4});
    for (std::int64_t i = 0; i < a.num_batches(); ++i) {
        CHECK(a.batch(i).labels == b.batch(i).labels);
        CHECK(a.batch(i).inputs.data == b.batch(i).inputs.data);
    }
    // A different epoch yields a different order.
    BatchSequence c = batches(train, BatchPlan{9, 4, 4});
    bool any_difference = false;
    for (std::int64_t i = 0; i < a.num_batches() && !any_difference; ++i) {
        any_difference = a.batch(i).labels != c.batch(i).labels;
    }
    CHECK(any_difference);
}

TEST_CASE("bad batch sizes are rejected") {
    const std::string dir = testutil::write_idx_fixture("badbatch", 6, 2);
    auto [train, test] = load_mnist(dir);
    CHECK_THROWS_AS(batches(train, BatchPlan{1, 1, 0}), ConfigError);
    CHECK_THROWS_AS(batches(train, BatchPlan{1, 1, 7}), ConfigError);
}

TEST_CASE("cifar-10 binary batches parse with the 3073-byte record layout") {
    const fs::path dir = fs::temp_directory_path() / "asni_cifar_fixture";
    fs::create_directories(dir);
    auto write_batch = [&](const std::string& name) {
        std::ofstream out(dir / name, std::ios::binary);
        std::vector<char> record(3073, 0);
        for (int r = 0; r < 10000; ++r) {
            record[0] = static_cast<char>(r % 10);
            record[1] = static_cast<char>(255); // first red pixel
            out.write(record.data(), static_cast<std::streamsize>(record.size()));
        }
    };
    for (int i = 1; i <= 5; ++i) write_batch("data_batch_" + std::to_string(i) + ".bin");
    write_batch("test_batch.bin");

    auto [train, test] = load_cifar10(dir.string());
    CHECK(train.size() == 50000);
    CHECK(test.size() == 10000);
    CHECK(train.images.shape == std::vector<std::int64_t>{50000, 3, 32, 32});
    CHECK(train.images.data[0] == 1.0f); // 255/255
    CHECK(train.images.data[1] == 0.0f);
    for (auto l : train.labels) {
        CHECK(l >= 0);
        CHECK(l <= 9);
    }

    // A short file is rejected.
    fs::resize_file(dir / "test_batch.bin", 3073 * 100);
    try {
        load_cifar10(dir.string());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.kind == DataError::Kind::truncated);
    }
    fs::remove_all(dir);
}
