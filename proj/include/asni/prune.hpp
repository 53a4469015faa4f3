#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "asni/param_store.hpp"

namespace asni {

// Record of one global pruning pass.
struct PruneEvent {
    int epoch = 0;
    double p = 0.0;    // requested sparsity percentage
    double tau_g = 0.0; // k-th smallest magnitude over all prunable parameters
    std::int64_t nonzeros_total = 0;
    std::vector<std::int64_t> nonzeros_per_layer;
};

// Global magnitude pruning over ALL prunable parameters (zeros included in
// the pool). Masks the k = round(p/100 * d) smallest magnitudes, ties broken
// by ascending flat index. Does not modify `params`; callers apply the mask.
std::pair<Mask, PruneEvent> global_prune(const ParamStore& params, double p);

// Pruning step of the lottery-ticket baselines: masks the k smallest-magnitude
// coordinates among those currently NONZERO under `current`, where
// k = round(p/100 * current nonzero count). Already-pruned coordinates stay
// pruned.
std::pair<Mask, PruneEvent> prune_nonzero_fraction(const ParamStore& params,
                                                   const Mask& current, double p);

// Per-layer nonzero counts of the mask, in prunable-entry order.
std::vector<std::int64_t> mask_layer_nonzeros(const Mask& mask);

} // namespace asni
