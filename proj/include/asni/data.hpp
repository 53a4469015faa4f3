#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "asni/batch.hpp"
#include "asni/tensor.hpp"

namespace asni {

// An image-classification split. Images are (N, C, H, W), scaled to [0, 1].
struct Dataset {
    std::string name;
    std::string split; // "train" or "test"
    Tensor images;
    std::vector<std::int32_t> labels;

    std::int64_t size() const { return static_cast<std::int64_t>(labels.size()); }
    std::int64_t sample_numel() const { return shape_numel(images.shape) / size(); }
};

// Parses the four standard IDX files (train/t10k, images/labels) from `dir`.
// Pixel bytes are scaled by 1/255. Throws DataError with a kind of bad_magic,
// truncated or count_mismatch on malformed input.
std::pair<Dataset, Dataset> load_mnist(const std::string& dir);

// Parses the CIFAR-10 binary batches (data_batch_1..5.bin + test_batch.bin),
// 3073-byte records of 1 label byte + 3072 CHW pixel bytes.
std::pair<Dataset, Dataset> load_cifar10(const std::string& dir);

// Deterministic epoch plan: (seed, epoch) fully determine the permutation.
struct BatchPlan {
    std::uint64_t seed = 0;
    int epoch = 1;
    std::int64_t batch_size = 1;
};

std::vector<std::int64_t> make_permutation(const BatchPlan& plan, std::int64_t n);

// floor(N/B) full batches in permutation order; the remainder is dropped.
class BatchSequence {
public:
    BatchSequence(const Dataset& dataset, const BatchPlan& plan);

    std::int64_t num_batches() const { return num_batches_; }
    Batch batch(std::int64_t index) const;

private:
    const Dataset& dataset_;
    std::vector<std::int64_t> permutation_;
    std::int64_t batch_size_;
    std::int64_t num_batches_;
};

BatchSequence batches(const Dataset& dataset, const BatchPlan& plan);

} // namespace asni
