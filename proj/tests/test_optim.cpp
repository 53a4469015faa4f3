#include <doctest.h>

#include <cmath>

#include "asni/errors.hpp"
#include "asni/network.hpp"
#include "asni/optim.hpp"
#include "test_util.hpp"

using namespace asni;

namespace {

// One prunable weight vector of length n plus a bias, for direct step tests.
ParamStore vector_store(const std::vector<float>& weights) {
    ParamStore store;
    store.add({"w.weight", Tensor({static_cast<std::int64_t>(weights.size())}, weights), true, 0});
    store.add({"w.bias", Tensor::zeros({2}), false, 0});
    return store;
}

Gradients grads_like(const ParamStore& params) {
    Gradients g;
    for (std::size_t i = 0; i < params.size(); ++i) {
        g.tensors.push_back(Tensor::zeros(params.entry(i).tensor.shape));
    }
    return g;
}

} // namespace

TEST_CASE("constant schedule returns eta0 on every epoch") {
    const LrSchedule s = LrSchedule::constant(1.2e-3, 50);
    for (int e = 1; e <= 50; ++e) CHECK(lr_at(s, e) == 1.2e-3);
    CHECK_THROWS_AS(lr_at(s, 0), ConfigError);
    CHECK_THROWS_AS(lr_at(s, 51), ConfigError);
}

TEST_CASE("cosine value starts at eta0 and hits the frozen endpoint") {
    // Boundary: the raw cosine at e = 0 is exactly eta0.
    CHECK(cosine_rate(0.05, 0.05, 160, 0.0) == 0.05);

    // eta0 = 0.05, delta = 0.05, E = 160, e = 160.
    const LrSchedule s = LrSchedule::cosine(0.05, 0.05, 160);
    CHECK(lr_at(s, 160) == doctest::Approx(0.0037365047).epsilon(1e-6));

    // Non-increasing and positive across the range.
    double prev = lr_at(s, 1);
    for (int e = 2; e <= 160; ++e) {
        const double cur = lr_at(s, e);
        CHECK(cur > 0.0);
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("warmup ramps linearly then re-phases the cosine at eta0") {
    const LrSchedule s = LrSchedule::cosine_warmup(0.35, 0.04, 90, 10);
    CHECK(lr_at(s, 5) == doctest::Approx(0.175).epsilon(1e-12));
    CHECK(lr_at(s, 10) == doctest::Approx(0.35).epsilon(1e-12));
    // First post-warmup epoch starts the cosine offset by one step.
    CHECK(lr_at(s, 11) == doctest::Approx(cosine_rate(0.35, 0.04, 90, 1.0)).epsilon(1e-12));
    for (int e = 1; e <= 90; ++e) CHECK(lr_at(s, e) > 0.0);
}

TEST_CASE("lr stays positive across every preset policy") {
    // Adam presets (combos 1-7) use constant rates; the larger nets use
    // cosine and cosine-with-warmup policies.
    const std::vector<LrSchedule> schedules = {
        LrSchedule::constant(1.2e-3, 50), LrSchedule::constant(2e-4, 20),
        LrSchedule::constant(3e-4, 25),   LrSchedule::constant(3e-4, 30),
        LrSchedule::cosine(0.05, 0.05, 160), LrSchedule::cosine(0.08, 0.05, 160),
        LrSchedule::cosine_warmup(0.35, 0.04, 90, 10)};
    for (const auto& s : schedules) {
        for (int e = 1; e <= s.total_epochs; ++e) {
            CHECK(lr_at(s, e) > 0.0);
        }
    }
}

TEST_CASE("sgd+m first step from zero velocity is -lr*g") {
    ParamStore params = vector_store({1.0f, -2.0f, 3.0f});
    const ParamStore before = params;
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::sgd_momentum;
    OptimizerState opt(cfg, params);

    Gradients g = grads_like(params);
    g.tensors[0].data = {0.5f, -0.25f, 1.5f};
    const Mask mask = Mask::all_ones(params);
    opt.step(params, g, mask, 0.1);

    for (int i = 0; i < 3; ++i) {
        const float expect = before.entry(0).tensor.data[static_cast<std::size_t>(i)] -
                             0.1f * g.tensors[0].data[static_cast<std::size_t>(i)];
        CHECK(params.entry(0).tensor.data[static_cast<std::size_t>(i)] ==
              doctest::Approx(expect).epsilon(1e-7));
    }
}

TEST_CASE("adam first step is -lr*sign(g) up to epsilon") {
    ParamStore params = vector_store({0.0f, 0.0f, 0.0f});
    OptimizerConfig cfg; // adam defaults
    OptimizerState opt(cfg, params);

    Gradients g = grads_like(params);
    g.tensors[0].data = {0.5f, -0.003f, 2.0f};
    const Mask mask = Mask::all_ones(params);
    opt.step(params, g, mask, 0.01);

    for (int i = 0; i < 3; ++i) {
        const float gi = g.tensors[0].data[static_cast<std::size_t>(i)];
        const double expect = -0.01 * (gi > 0 ? 1.0 : -1.0);
        CHECK(params.entry(0).tensor.data[static_cast<std::size_t>(i)] ==
              doctest::Approx(expect).epsilon(1e-4));
    }
    CHECK(opt.steps_taken() == 1);
}

TEST_CASE("a masked coordinate never moves and its adam moments stay zero") {
    ParamStore params = vector_store({1.0f, -2.0f, 3.0f, 4.0f});
    OptimizerConfig cfg;
    OptimizerState opt(cfg, params);

    Mask mask = Mask::all_ones(params);
    mask.bits[1] = 0;
    mask.bits[3] = 0;

    Rng rng(7);
    for (int step = 0; step < 100; ++step) {
        Gradients g = grads_like(params);
        for (float& v : g.tensors[0].data) v = static_cast<float>(rng.next_normal());
        for (float& v : g.tensors[1].data) v = static_cast<float>(rng.next_normal());
        opt.step(params, g, mask, 1e-3);
    }

    CHECK(params.entry(0).tensor.data[1] == -2.0f);
    CHECK(params.entry(0).tensor.data[3] == 4.0f);
    CHECK(opt.buffer(0, 0).data[1] == 0.0f);
    CHECK(opt.buffer(1, 0).data[1] == 0.0f);
    CHECK(opt.buffer(0, 0).data[3] == 0.0f);
    CHECK(opt.buffer(1, 0).data[3] == 0.0f);
    // Unmasked coordinates did move.
    CHECK(params.entry(0).tensor.data[0] != 1.0f);
    CHECK(params.entry(0).tensor.data[2] != 3.0f);
}

TEST_CASE("mask absorption holds exactly for both optimizers") {
    for (OptimizerKind kind : {OptimizerKind::adam, OptimizerKind::sgd_momentum}) {
        for (std::uint64_t trial = 0; trial < 50; ++trial) {
            Rng rng(trial * 31 + 11);
            std::vector<float> w(16);
            for (float& v : w) v = static_cast<float>(rng.next_normal());
            ParamStore params = vector_store(w);
            const ParamStore before = params;

            Mask mask = Mask::all_ones(params);
            for (auto& bit : mask.bits) bit = rng.next_below(2) ? 1 : 0;

            OptimizerConfig cfg;
            cfg.kind = kind;
            cfg.weight_decay = trial % 2 ? 0.01 : 0.0;
            OptimizerState opt(cfg, params);
            for (int step = 0; step < 5; ++step) {
                Gradients g = grads_like(params);
                for (float& v : g.tensors[0].data) v = static_cast<float>(rng.next_normal());
                opt.step(params, g, mask, 0.05);
            }

            for (std::size_t i = 0; i < w.size(); ++i) {
                if (!mask.bits[i]) {
                    CHECK(params.entry(0).tensor.data[i] == before.entry(0).tensor.data[i]);
                }
            }
        }
    }
}

TEST_CASE("sgd with zero momentum equals vanilla gradient descent") {
    Rng rng(5);
    std::vector<float> w(12);
    for (float& v : w) v = static_cast<float>(rng.next_normal());
    ParamStore params = vector_store(w);
    ParamStore reference = params;

    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::sgd_momentum;
    cfg.momentum = 0.0;
    OptimizerState opt(cfg, params);
    const Mask mask = Mask::all_ones(params);

    for (int step = 0; step < 10; ++step) {
        Gradients g = grads_like(params);
        for (float& v : g.tensors[0].data) v = static_cast<float>(rng.next_normal());
        for (float& v : g.tensors[1].data) v = static_cast<float>(rng.next_normal());
        opt.step(params, g, mask, 0.02);
        // Vanilla descent on the reference store.
        for (std::size_t i = 0; i < reference.entry(0).tensor.data.size(); ++i) {
            reference.entry(0).tensor.data[i] -= 0.02f * g.tensors[0].data[i];
        }
        for (std::size_t i = 0; i < reference.entry(1).tensor.data.size(); ++i) {
            reference.entry(1).tensor.data[i] -= 0.02f * g.tensors[1].data[i];
        }
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
        CHECK(params.entry(0).tensor.data[i] ==
              doctest::Approx(reference.entry(0).tensor.data[i]).epsilon(1e-7));
    }
}

TEST_CASE("step validates shapes and learning rate") {
    ParamStore params = vector_store({1.0f, 2.0f});
    OptimizerConfig cfg;
    OptimizerState opt(cfg, params);
    const Mask mask = Mask::all_ones(params);

    Gradients wrong;
    wrong.tensors.push_back(Tensor::zeros({3}));
    CHECK_THROWS_AS(opt.step(params, wrong, mask, 0.1), ShapeError);

    Gradients g = grads_like(params);
    CHECK_THROWS_AS(opt.step(params, g, mask, 0.0), ConfigError);

    Mask short_mask;
    short_mask.bits = {1};
    short_mask.layer_offsets = {0, 1};
    CHECK_THROWS_AS(opt.step(params, g, short_mask, 0.1), ShapeError);
}

TEST_CASE("weight decay only touches unmasked prunable coordinates") {
    ParamStore params = vector_store({1.0f, 1.0f});
    params.entry(1).tensor.data = {1.0f, 1.0f}; // nonzero bias to observe decay
    OptimizerConfig cfg;
    cfg.kind = OptimizerKind::sgd_momentum;
    cfg.weight_decay = 0.1;
    OptimizerState opt(cfg, params);

    Mask mask = Mask::all_ones(params);
    mask.bits[1] = 0;

    Gradients g = grads_like(params); // zero gradients isolate the decay term
    opt.step(params, g, mask, 1.0);

    CHECK(params.entry(0).tensor.data[0] == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(params.entry(0).tensor.data[1] == 1.0f); // masked: untouched
    CHECK(params.entry(1).tensor.data[0] == 1.0f); // bias: no decay
}
