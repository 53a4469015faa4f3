#include <doctest.h>

#include <cmath>
#include <set>

#include "asni/amenable.hpp"
#include "asni/errors.hpp"
#include "asni/network.hpp"
#include "asni/prune.hpp"
#include "asni/training.hpp"
#include "test_util.hpp"

using namespace asni;

namespace {

ParamStore layer_store(const std::vector<float>& weights) {
    ParamStore store;
    store.add({"w.weight", Tensor({static_cast<std::int64_t>(weights.size())}, weights), true, 0});
    store.add({"w.bias", Tensor({2}, {0.25f, -0.5f}), false, 0});
    return store;
}

Mask support_mask(const ParamStore& params) {
    Mask mask = Mask::all_ones(params);
    std::int64_t at = 0;
    for (const auto& e : params) {
        if (!e.prunable) continue;
        for (std::int64_t i = 0; i < e.tensor.numel(); ++i) {
            mask.bits[static_cast<std::size_t>(at + i)] =
                e.tensor.data[static_cast<std::size_t>(i)] != 0.0f ? 1 : 0;
        }
        at += e.tensor.numel();
    }
    return mask;
}

} // namespace

TEST_CASE("centroids are the signed pool means") {
    ParamStore store = layer_store({2.0f, 4.0f, -1.0f, -3.0f, 0.0f});
    CentroidSet set = extract_centroids(store);
    REQUIRE(set.rows.size() == 1);
    CHECK(set.rows[0].c_pos == 3.0);
    CHECK(set.rows[0].c_neg == -2.0);
    CHECK(set.rows[0].n_pos == 2);
    CHECK(set.rows[0].n_neg == 2);
}

TEST_CASE("a one-sided layer gets a zero centroid for the empty pool") {
    ParamStore store = layer_store({1.0f, 3.0f});
    CentroidSet set = extract_centroids(store);
    REQUIRE(set.rows.size() == 1);
    CHECK(set.rows[0].c_pos == 2.0);
    CHECK(set.rows[0].c_neg == 0.0);
    CHECK(set.rows[0].n_neg == 0);
}

TEST_CASE("the stored centroid list is exactly 2L numbers") {
    // L prunable layers -> 2L reals, structurally, on any architecture.
    for (const auto& spec : {make_fc({1, 28, 28}), make_conv2({1, 12, 12})}) {
        ParamStore params = build_network(spec, 5);
        CentroidSet set = extract_centroids(params);
        CHECK(set.layer_count() == params.prunable_entries().size());
        CHECK(set.values().size() == 2 * set.layer_count());
    }
}

TEST_CASE("build_init substitutes centroids by sign") {
    ParamStore store = layer_store({2.0f, 4.0f, -1.0f, -3.0f, 0.0f});
    const Mask mask = support_mask(store);
    CentroidSet set = extract_centroids(store);
    AmenableInit init = build_init(set, store, mask);

    const auto& w = init.params.entry(0).tensor.data;
    CHECK(w == std::vector<float>{3.0f, 3.0f, -2.0f, -2.0f, 0.0f});
    // Biases are reset to zero.
    for (float v : init.params.entry(1).tensor.data) CHECK(v == 0.0f);
    CHECK(init.provenance == InitProvenance::centroid);
}

TEST_CASE("build_init preserves the sign pattern everywhere") {
    NetworkSpec spec = make_fc({1, 8, 8});
    ParamStore params = build_network(spec, 21);
    auto [mask, event] = global_prune(params, 70.0);
    apply_mask(params, mask);

    CentroidSet set = extract_centroids(params);
    AmenableInit init = build_init(set, params, mask);

    for (std::size_t ei = 0; ei < params.size(); ++ei) {
        if (!params.entry(ei).prunable) continue;
        const auto& src = params.entry(ei).tensor.data;
        const auto& dst = init.params.entry(ei).tensor.data;
        std::set<float> nonzero_values;
        for (std::size_t i = 0; i < src.size(); ++i) {
            CHECK(((src[i] > 0) == (dst[i] > 0)));
            CHECK(((src[i] < 0) == (dst[i] < 0)));
            if (dst[i] != 0.0f) nonzero_values.insert(dst[i]);
        }
        // Quantization: at most two distinct nonzero values per layer.
        CHECK(nonzero_values.size() <= 2);
    }
}

TEST_CASE("build_init rejects a mask that disagrees with theta*") {
    ParamStore store = layer_store({2.0f, 4.0f, -1.0f, -3.0f, 0.0f});
    Mask mask = support_mask(store);
    mask.bits[0] = 0; // claims a nonzero coordinate is pruned
    CentroidSet set = extract_centroids(store);
    CHECK_THROWS_AS(build_init(set, store, mask), ShapeError);
}

TEST_CASE("original-init rebuild: identity under an all-ones mask") {
    NetworkSpec spec = make_fc({1, 8, 8});
    ParamStore orig = build_network(spec, 31);
    const Mask ones = Mask::all_ones(orig);
    AmenableInit init = build_original_init(orig, ones);
    for (std::size_t i = 0; i < orig.size(); ++i) {
        CHECK(init.params.entry(i).tensor.data == orig.entry(i).tensor.data);
    }
    CHECK(init.provenance == InitProvenance::original);
}

TEST_CASE("original-init rebuild: masked coordinates zero, survivors bit-equal") {
    NetworkSpec spec = make_fc({1, 8, 8});
    ParamStore orig = build_network(spec, 41);
    auto [mask, event] = global_prune(orig, 55.0);
    AmenableInit init = build_original_init(orig, mask);

    std::int64_t at = 0;
    for (std::size_t ei = 0; ei < orig.size(); ++ei) {
        const auto& src = orig.entry(ei).tensor.data;
        const auto& dst = init.params.entry(ei).tensor.data;
        if (!orig.entry(ei).prunable) {
            CHECK(src == dst); // biases carried over from the original init
            continue;
        }
        for (std::size_t i = 0; i < src.size(); ++i) {
            if (mask.bits[static_cast<std::size_t>(at) + i]) {
                CHECK(dst[i] == src[i]);
            } else {
                CHECK(dst[i] == 0.0f);
            }
        }
        at += orig.entry(ei).tensor.numel();
    }
}

TEST_CASE("retraining never grows the support and keeps zeros frozen") {
    NetworkSpec spec;
    spec.input_shape = {4};
    spec.layers = {LayerSpec::linear(4, 6), LayerSpec::relu(), LayerSpec::linear(6, 4)};
    ParamStore params = build_network(spec, 51);
    auto [mask, event] = global_prune(params, 40.0);
    apply_mask(params, mask);
    CentroidSet set = extract_centroids(params);
    AmenableInit init = build_init(set, params, mask);

    const Dataset train = testutil::toy_dataset(16, 4, 4, 3001);
    const Dataset test = testutil::toy_dataset(8, 4, 4, 3002, "test");
    TrainerConfig cfg;
    cfg.lr_schedule = LrSchedule::constant(0.02, 3);
    cfg.epochs = 3;
    cfg.batch_size = 4;
    cfg.shuffle_seed = 3;
    cfg.evaluate_each_epoch = false;

    RetrainResult res = retrain_amenable(init, spec, train, test, cfg);
    std::int64_t at = 0;
    for (const auto& e : res.trained) {
        if (!e.prunable) continue;
        for (std::int64_t i = 0; i < e.tensor.numel(); ++i) {
            if (!init.mask.bits[static_cast<std::size_t>(at + i)]) {
                CHECK(e.tensor.data[static_cast<std::size_t>(i)] == 0.0f);
            }
        }
        at += e.tensor.numel();
    }
    CHECK(res.metrics.size() == 3);
    CHECK(res.test_accuracy >= 0.0);
}

TEST_CASE("an all-zero init with an all-zero mask predicts the majority class") {
    NetworkSpec spec;
    spec.input_shape = {3};
    spec.layers = {LayerSpec::linear(3, 3)};
    ParamStore params = build_network(spec, 61);
    for (auto& e : params) {
        for (float& v : e.tensor.data) v = 0.0f;
    }
    Mask zero_mask = Mask::all_ones(params);
    std::fill(zero_mask.bits.begin(), zero_mask.bits.end(), std::uint8_t{0});

    // Class 0 holds 6 of 10 samples. Logits stay constant per sample (all
    // weights frozen at zero; only the shared bias can move), so the argmax
    // lands on the majority class and accuracy equals its rate.
    Dataset data = testutil::toy_dataset(10, 3, 3, 3010);
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
        if (i < 6) data.labels[i] = 0;
    }

    AmenableInit init;
    init.params = params;
    init.mask = zero_mask;
    TrainerConfig cfg;
    cfg.lr_schedule = LrSchedule::constant(0.01, 2);
    cfg.epochs = 2;
    cfg.batch_size = 5;
    cfg.shuffle_seed = 4;
    cfg.evaluate_each_epoch = false;

    RetrainResult res = retrain_amenable(init, spec, data, data, cfg);
    CHECK(res.test_accuracy == doctest::Approx(0.6));
    for (const auto& e : res.trained) {
        if (e.prunable) {
            for (float v : e.tensor.data) CHECK(v == 0.0f);
        }
    }
    // The loss can only drift through the class-prior biases; it never rises
    // above the uniform-logit value.
    for (const auto& rec : res.metrics) {
        CHECK(rec.train_loss <= std::log(3.0) + 1e-6);
        CHECK(std::isfinite(rec.train_loss));
    }
}
