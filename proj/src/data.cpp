#include "asni/data.hpp"

#include <fstream>

#include "asni/errors.hpp"
#include "asni/rng.hpp"

namespace asni {

namespace {

constexpr std::uint32_t kIdxImageMagic = 2051; // 0x00000803
constexpr std::uint32_t kIdxLabelMagic = 2049; // 0x00000801

std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(DataError::Kind::io, "cannot open '" + path + "'");
    in.seekg(0, std::ios::end);
    const auto size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<unsigned char> bytes(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw DataError(DataError::Kind::io, "read failed for '" + path + "'");
    return bytes;
}

std::uint32_t read_be32(const std::vector<unsigned char>& b, std::size_t at,
                        const std::string& path) {
    if (at + 4 > b.size()) {
        throw DataError(DataError::Kind::truncated, "'" + path + "' truncated in header");
    }
    return (static_cast<std::uint32_t>(b[at]) << 24) |
           (static_cast<std::uint32_t>(b[at + 1]) << 16) |
           (static_cast<std::uint32_t>(b[at + 2]) << 8) |
           static_cast<std::uint32_t>(b[at + 3]);
}

struct IdxImages {
    std::int64_t count = 0, rows = 0, cols = 0;
    std::vector<unsigned char> pixels;
};

IdxImages read_idx_images(const std::string& path) {
    const auto bytes = read_file(path);
    const std::uint32_t magic = read_be32(bytes, 0, path);
    if (magic != kIdxImageMagic) {
        throw DataError(DataError::Kind::bad_magic,
                        "'" + path + "' has image magic " + std::to_string(magic) +
                            ", expected " + std::to_string(kIdxImageMagic));
    }
    IdxImages out;
    out.count = read_be32(bytes, 4, path);
    out.rows = read_be32(bytes, 8, path);
    out.cols = read_be32(bytes, 12, path);
    const std::size_t expect = 16 + static_cast<std::size_t>(out.count * out.rows * out.cols);
    if (bytes.size() < expect) {
        throw DataError(DataError::Kind::truncated,
                        "'" + path + "' holds " + std::to_string(bytes.size()) +
                            " bytes, expected " + std::to_string(expect));
    }
    out.pixels.assign(bytes.begin() + 16, bytes.begin() + static_cast<std::ptrdiff_t>(expect));
    return out;
}

std::vector<std::int32_t> read_idx_labels(const std::string& path) {
    const auto bytes = read_file(path);
    const std::uint32_t magic = read_be32(bytes, 0, path);
    if (magic != kIdxLabelMagic) {
        throw DataError(DataError::Kind::bad_magic,
                        "'" + path + "' has label magic " + std::to_string(magic) +
                            ", expected " + std::to_string(kIdxLabelMagic));
    }
    const std::uint32_t count = read_be32(bytes, 4, path);
    if (bytes.size() < 8 + count) {
        throw DataError(DataError::Kind::truncated,
                        "'" + path + "' holds " + std::to_string(bytes.size()) +
                            " bytes, expected " + std::to_string(8 + count));
    }
    std::vector<std::int32_t> labels(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        labels[i] = static_cast<std::int32_t>(bytes[8 + i]);
        if (labels[i] < 0 || labels[i] > 9) {
            throw DataError(DataError::Kind::bad_value,
                            "'" + path + "' label " + std::to_string(labels[i]) +
                                " outside [0,9]");
        }
    }
    return labels;
}

Dataset make_split(const std::string& name, const std::string& split, IdxImages images,
                   std::vector<std::int32_t> labels, const std::string& image_path) {
    if (images.count != static_cast<std::int64_t>(labels.size())) {
        throw DataError(DataError::Kind::count_mismatch,
                        "'" + image_path + "' has " + std::to_string(images.count) +
                            " images but " + std::to_string(labels.size()) + " labels");
    }
    Dataset ds;
    ds.name = name;
    ds.split = split;
    ds.labels = std::move(labels);
    std::vector<float> px(images.pixels.size());
    for (std::size_t i = 0; i < images.pixels.size(); ++i) {
        px[i] = static_cast<float>(images.pixels[i]) * (1.0f / 255.0f);
    }
    ds.images = Tensor({images.count, 1, images.rows, images.cols}, std::move(px));
    return ds;
}

} // namespace

std::pair<Dataset, Dataset> load_mnist(const std::string& dir) {
    const std::string ti = dir + "/train-images-idx3-ubyte";
    const std::string tl = dir + "/train-labels-idx1-ubyte";
    const std::string vi = dir + "/t10k-images-idx3-ubyte";
    const std::string vl = dir + "/t10k-labels-idx1-ubyte";
    Dataset train = make_split("mnist", "train", read_idx_images(ti), read_idx_labels(tl), ti);
    Dataset test = make_split("mnist", "test", read_idx_images(vi), read_idx_labels(vl), vi);
    return {std::move(train), std::move(test)};
}

namespace {

constexpr std::int64_t kCifarRecord = 3073; // 1 label byte + 3*32*32 pixels
constexpr std::int64_t kCifarPerFile = 10000;

void append_cifar_file(const std::string& path, std::vector<float>& px,
                       std::vector<std::int32_t>& labels) {
    const auto bytes = read_file(path);
    if (static_cast<std::int64_t>(bytes.size()) != kCifarRecord * kCifarPerFile) {
        throw DataError(DataError::Kind::truncated,
                        "'" + path + "' holds " + std::to_string(bytes.size()) +
                            " bytes, expected " + std::to_string(kCifarRecord * kCifarPerFile));
    }
    for (std::int64_t r = 0; r < kCifarPerFile; ++r) {
        const unsigned char* rec = bytes.data() + r * kCifarRecord;
        const std::int32_t label = rec[0];
        if (label > 9) {
            throw DataError(DataError::Kind::bad_value,
                            "'" + path + "' label " + std::to_string(label) + " outside [0,9]");
        }
        labels.push_back(label);
        for (std::int64_t i = 0; i < kCifarRecord - 1; ++i) {
            px.push_back(static_cast<float>(rec[1 + i]) * (1.0f / 255.0f));
        }
    }
}

} // namespace

std::pair<Dataset, Dataset> load_cifar10(const std::string& dir) {
    Dataset train;
    train.name = "cifar10";
    train.split = "train";
    std::vector<float> px;
    px.reserve(static_cast<std::size_t>(5 * kCifarPerFile * (kCifarRecord - 1)));
    for (int i = 1; i <= 5; ++i) {
        append_cifar_file(dir + "/data_batch_" + std::to_string(i) + ".bin", px, train.labels);
    }
    train.images = Tensor({5 * kCifarPerFile, 3, 32, 32}, std::move(px));

    Dataset test;
    test.name = "cifar10";
    test.split = "test";
    std::vector<float> tpx;
    tpx.reserve(static_cast<std::size_t>(kCifarPerFile * (kCifarRecord - 1)));
    append_cifar_file(dir + "/test_batch.bin", tpx, test.labels);
    test.images = Tensor({kCifarPerFile, 3, 32, 32}, std::move(tpx));
    return {std::move(train), std::move(test)};
}

std::vector<std::int64_t> make_permutation(const BatchPlan& plan, std::int64_t n) {
    std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    Rng rng(mix_seed(plan.seed, static_cast<std::uint64_t>(plan.epoch)));
    rng.shuffle(perm);
    return perm;
}

BatchSequence::BatchSequence(const Dataset& dataset, const BatchPlan& plan)
    : dataset_(dataset),
      permutation_(make_permutation(plan, dataset.size())),
      batch_size_(plan.batch_size),
      num_batches_(0) {
    if (plan.batch_size < 1) throw ConfigError("batch size must be at least 1");
    if (plan.batch_size > dataset.size()) {
        throw ConfigError("batch size " + std::to_string(plan.batch_size) +
                          " exceeds dataset size " + std::to_string(dataset.size()));
    }
    num_batches_ = dataset.size() / batch_size_;
}

Batch BatchSequence::batch(std::int64_t index) const {
    const std::int64_t sample = dataset_.sample_numel();
    Batch out;
    std::vector<std::int64_t> shape = {batch_size_};
    shape.insert(shape.end(), dataset_.images.shape.begin() + 1, dataset_.images.shape.end());
    std::vector<float> buf(static_cast<std::size_t>(batch_size_ * sample));
    out.labels.resize(static_cast<std::size_t>(batch_size_));
    for (std::int64_t i = 0; i < batch_size_; ++i) {
        const std::int64_t src = permutation_[static_cast<std::size_t>(index * batch_size_ + i)];
        const float* from = dataset_.images.ptr() + src * sample;
        std::copy(from, from + sample, buf.begin() + static_cast<std::ptrdiff_t>(i * sample));
        out.labels[static_cast<std::size_t>(i)] = dataset_.labels[static_cast<std::size_t>(src)];
    }
    out.inputs = Tensor(std::move(shape), std::move(buf));
    return out;
}

BatchSequence batches(const Dataset& dataset, const BatchPlan& plan) {
    return {dataset, plan};
}

} // namespace asni
