#include "asni/training.hpp"

#include <cmath>
#include <string>

#include "asni/errors.hpp"
#include "asni/rng.hpp"

namespace asni {

namespace {

// T optimizer steps over one shuffled epoch. Returns mean batch loss.
// `snapshot_step`, when positive, copies the parameters right after that
// step (1-based, counted within this call) into `snapshot_out`.
double run_epoch(ParamStore& params, const NetworkSpec& spec, const Dataset& train,
                 const TrainerConfig& cfg, OptimizerState& opt, const Mask& mask, int epoch,
                 std::uint64_t plan_seed, double lr, std::int64_t snapshot_step = 0,
                 ParamStore* snapshot_out = nullptr, std::int64_t step_base = 0) {
    BatchSequence seq = batches(train, BatchPlan{plan_seed, epoch, cfg.batch_size});
    double loss_sum = 0.0;
    for (std::int64_t b = 0; b < seq.num_batches(); ++b) {
        const Batch batch = seq.batch(b);
        LossGrad lg = loss_and_grad(params, spec, batch);
        if (!std::isfinite(lg.loss)) {
            throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                               std::to_string(b + 1));
        }
        loss_sum += lg.loss;
        opt.step(params, lg.grads, mask, lr);
        if (snapshot_out && step_base + b + 1 == snapshot_step) {
            *snapshot_out = params;
        }
    }
    return loss_sum / static_cast<double>(seq.num_batches());
}

double sparsity_pct_of(const Mask& mask) {
    if (mask.size() == 0) return 0.0;
    return 100.0 * static_cast<double>(mask.size() - mask.popcount()) /
           static_cast<double>(mask.size());
}

} // namespace

std::vector<MetricsRecord> train_fixed_mask(ParamStore& params, const NetworkSpec& spec,
                                            const Dataset& train, const Dataset& test,
                                            const TrainerConfig& cfg, const Mask& mask) {
    spec.validate();
    OptimizerState opt(cfg.optimizer, params);
    std::vector<MetricsRecord> metrics;
    metrics.reserve(static_cast<std::size_t>(cfg.epochs));

    const double p_fixed = sparsity_pct_of(mask);
    const std::int64_t nnz = mask.popcount();

    for (int e = 1; e <= cfg.epochs; ++e) {
        const double lr = lr_at(cfg.lr_schedule, e);
        const double loss =
            run_epoch(params, spec, train, cfg, opt, mask, e, cfg.shuffle_seed, lr);
        MetricsRecord rec;
        rec.epoch = e;
        rec.train_loss = loss;
        rec.test_accuracy = cfg.evaluate_each_epoch
                                ? accuracy(params, spec, test.images, test.labels)
                                : 0.0;
        rec.p = p_fixed;
        rec.tau_g = 0.0;
        rec.nonzeros = nnz;
        rec.lr = lr;
        metrics.push_back(rec);
    }
    return metrics;
}

AsniResult asni_one_round(ParamStore params, const NetworkSpec& spec, const Dataset& train,
                          const Dataset& test, const TrainerConfig& cfg,
                          const SparsitySchedule& schedule) {
    spec.validate();
    if (schedule.total_epochs != cfg.epochs) {
        throw ConfigError("sparsity schedule spans " + std::to_string(schedule.total_epochs) +
                          " epochs but the trainer runs " + std::to_string(cfg.epochs));
    }

    AsniResult result;
    result.mask = Mask::all_ones(params);
    OptimizerState opt(cfg.optimizer, params);

    for (int e = 1; e <= cfg.epochs; ++e) {
        const double lr = lr_at(cfg.lr_schedule, e);
        const double loss =
            run_epoch(params, spec, train, cfg, opt, result.mask, e, cfg.shuffle_seed, lr);

        const double p = sparsity_at(schedule, e);
        auto [mask, event] = global_prune(params, p);
        event.epoch = e;
        result.mask = std::move(mask);
        apply_mask(params, result.mask);
        if (cfg.record_epoch_masks) result.epoch_masks.push_back(result.mask);

        MetricsRecord rec;
        rec.epoch = e;
        rec.train_loss = loss;
        rec.test_accuracy = cfg.evaluate_each_epoch
                                ? accuracy(params, spec, test.images, test.labels)
                                : 0.0;
        rec.p = event.p;
        rec.tau_g = event.tau_g;
        rec.nonzeros = event.nonzeros_total;
        rec.lr = lr;
        result.metrics.push_back(rec);
        result.events.push_back(std::move(event));
    }

    result.theta_star = std::move(params);
    return result;
}

namespace {

LtaResult run_lta(const ParamStore& params0, const NetworkSpec& spec, const Dataset& train,
                  const Dataset& test, const TrainerConfig& cfg, double p_round, int rounds,
                  std::int64_t snapshot_step) {
    spec.validate();
    if (rounds < 1) throw ConfigError("lta needs at least one round");
    if (!(p_round > 0.0 && p_round < 100.0)) {
        throw ConfigError("per-round prune percentage must lie in (0,100)");
    }
    const std::int64_t steps_per_round =
        static_cast<std::int64_t>(cfg.epochs) * (train.size() / cfg.batch_size);
    if (snapshot_step < 0 || snapshot_step > steps_per_round) {
        throw ConfigError("rewind step k must lie in [1, T*E], got " +
                          std::to_string(snapshot_step));
    }

    LtaResult result;
    result.mask = Mask::all_ones(params0);
    ParamStore rewind_target = params0; // replaced by the step-k snapshot when stabilized
    ParamStore theta = params0;

    for (int round = 1; round <= rounds; ++round) {
        OptimizerState opt(cfg.optimizer, theta); // fresh optimizer per round
        const std::uint64_t plan_seed = mix_seed(cfg.shuffle_seed, static_cast<std::uint64_t>(round));
        std::int64_t step_base = 0;
        for (int e = 1; e <= cfg.epochs; ++e) {
            const double lr = lr_at(cfg.lr_schedule, e);
            const bool want_snapshot = round == 1 && snapshot_step > 0;
            run_epoch(theta, spec, train, cfg, opt, result.mask, e, plan_seed, lr,
                      want_snapshot ? snapshot_step : 0,
                      want_snapshot ? &rewind_target : nullptr, step_base);
            step_base += train.size() / cfg.batch_size;
        }
        result.round_accuracy.push_back(accuracy(theta, spec, test.images, test.labels));

        auto [mask, event] = prune_nonzero_fraction(theta, result.mask, p_round);
        event.epoch = round;
        result.mask = std::move(mask);
        result.events.push_back(std::move(event));

        // Rewind: survivors take the target's values, pruned coordinates stay 0.
        theta = rewind_target;
        apply_mask(theta, result.mask);
    }

    result.rewound = std::move(theta);
    result.rewind_target = std::move(rewind_target);
    return result;
}

} // namespace

LtaResult lta(const ParamStore& params0, const NetworkSpec& spec, const Dataset& train,
              const Dataset& test, const TrainerConfig& cfg, double p_round, int rounds) {
    return run_lta(params0, spec, train, test, cfg, p_round, rounds, 0);
}

LtaResult stabilized_lta(const ParamStore& params0, const NetworkSpec& spec,
                         const Dataset& train, const Dataset& test, const TrainerConfig& cfg,
                         double p_round, int rounds, std::int64_t k) {
    if (k < 1) throw ConfigError("rewind step k must be at least 1");
    return run_lta(params0, spec, train, test, cfg, p_round, rounds, k);
}

} // namespace asni
