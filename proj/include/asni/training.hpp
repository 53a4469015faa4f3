#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "asni/data.hpp"
#include "asni/metrics.hpp"
#include "asni/network.hpp"
#include "asni/optim.hpp"
#include "asni/prune.hpp"
#include "asni/schedule.hpp"

namespace asni {

// Shared knobs for a training run. The seed drives per-epoch batch shuffles;
// network initialization has its own seed at build_network time.
struct TrainerConfig {
    OptimizerConfig optimizer;
    LrSchedule lr_schedule;
    int epochs = 1;
    std::int64_t batch_size = 1;
    std::uint64_t shuffle_seed = 0;
    bool evaluate_each_epoch = true;
    bool record_epoch_masks = false; // keep every epoch's mask (property tests)
};

// Trains `params` in place for cfg.epochs with a FIXED mask (no pruning).
// Every optimizer step is masked, so the support never changes. Used for the
// dense variant (all-ones mask) and for retraining amenable networks.
std::vector<MetricsRecord> train_fixed_mask(ParamStore& params, const NetworkSpec& spec,
                                            const Dataset& train, const Dataset& test,
                                            const TrainerConfig& cfg, const Mask& mask);

struct AsniResult {
    ParamStore theta_star; // epoch-E parameters, masked
    Mask mask;
    std::vector<PruneEvent> events; // one per epoch
    std::vector<MetricsRecord> metrics;
    std::vector<Mask> epoch_masks; // filled when cfg.record_epoch_masks
};

// ASNI-I: each epoch runs T masked steps over the shuffled training data,
// then recomputes the global mask at the sigmoid schedule's percentage and
// zeroes the pruned coordinates. `params` must be fresh (dense); the mask
// starts all-ones.
AsniResult asni_one_round(ParamStore params, const NetworkSpec& spec, const Dataset& train,
                          const Dataset& test, const TrainerConfig& cfg,
                          const SparsitySchedule& schedule);

struct LtaResult {
    Mask mask;
    std::vector<double> round_accuracy; // test accuracy after each round's training
    std::vector<PruneEvent> events;     // one per round
    ParamStore rewound;                 // masked rewind of the final round
    ParamStore rewind_target;           // theta0, or the step-k snapshot when stabilized
};

// Lottery-ticket baseline: r rounds of (train T*E steps, prune p_round% of the
// currently nonzero parameters, rewind survivors to the original theta0).
LtaResult lta(const ParamStore& params0, const NetworkSpec& spec, const Dataset& train,
              const Dataset& test, const TrainerConfig& cfg, double p_round, int rounds);

// Stabilized variant: the rewind target is the parameter snapshot taken after
// step k (1-based) of the first round.
LtaResult stabilized_lta(const ParamStore& params0, const NetworkSpec& spec,
                         const Dataset& train, const Dataset& test, const TrainerConfig& cfg,
                         double p_round, int rounds, std::int64_t k);

} // namespace asni
