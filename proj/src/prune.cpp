#include "asni/prune.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "asni/errors.hpp"

namespace asni {

namespace {

std::vector<float> gather_prunable_magnitudes(const ParamStore& params) {
    std::vector<float> mags;
    mags.reserve(static_cast<std::size_t>(params.prunable_size()));
    for (const auto& e : params) {
        if (!e.prunable) continue;
        for (float v : e.tensor.data) mags.push_back(std::fabs(v));
    }
    return mags;
}

PruneEvent make_event(const Mask& mask, double p, double tau_g) {
    PruneEvent ev;
    ev.p = p;
    ev.tau_g = tau_g;
    ev.nonzeros_per_layer = mask_layer_nonzeros(mask);
    ev.nonzeros_total = 0;
    for (auto n : ev.nonzeros_per_layer) ev.nonzeros_total += n;
    return ev;
}

// Select the k smallest magnitudes (ties by ascending flat index) and zero
// their mask bits. Returns tau_g, the k-th smallest magnitude.
double mask_k_smallest(Mask& mask, const std::vector<float>& mags,
                       const std::vector<std::int64_t>& pool, std::int64_t k) {
    if (k <= 0) return 0.0;
    std::vector<std::int64_t> order = pool;
    auto cmp = [&](std::int64_t a, std::int64_t b) {
        const float ma = mags[static_cast<std::size_t>(a)];
        const float mb = mags[static_cast<std::size_t>(b)];
        if (ma != mb) return ma < mb;
        return a < b;
    };
    if (k < static_cast<std::int64_t>(order.size())) {
        std::nth_element(order.begin(), order.begin() + k, order.end(), cmp);
    }
    double tau = 0.0;
    for (std::int64_t i = 0; i < k; ++i) {
        const std::int64_t idx = order[static_cast<std::size_t>(i)];
        mask.bits[static_cast<std::size_t>(idx)] = 0;
        tau = std::max(tau, static_cast<double>(mags[static_cast<std::size_t>(idx)]));
    }
    return tau;
}

} // namespace

std::vector<std::int64_t> mask_layer_nonzeros(const Mask& mask) {
    std::vector<std::int64_t> counts;
    for (std::size_t l = 0; l + 1 < mask.layer_offsets.size(); ++l) {
        const auto [lo, hi] = mask.layer_span(l);
        std::int64_t n = 0;
        for (std::int64_t i = lo; i < hi; ++i) n += mask.bits[static_cast<std::size_t>(i)];
        counts.push_back(n);
    }
    return counts;
}

std::pair<Mask, PruneEvent> global_prune(const ParamStore& params, double p) {
    if (p < 0.0 || p >= 100.0) {
        throw ConfigError("prune percentage must lie in [0,100), got " + std::to_string(p));
    }
    const std::vector<float> mags = gather_prunable_magnitudes(params);
    const std::int64_t d = static_cast<std::int64_t>(mags.size());
    const std::int64_t k = std::llround(p / 100.0 * static_cast<double>(d));

    Mask mask = Mask::all_ones(params);
    std::vector<std::int64_t> pool(static_cast<std::size_t>(d));
    for (std::int64_t i = 0; i < d; ++i) pool[static_cast<std::size_t>(i)] = i;
    const double tau = mask_k_smallest(mask, mags, pool, k);

    PruneEvent ev = make_event(mask, p, tau);
    return {std::move(mask), std::move(ev)};
}

std::pair<Mask, PruneEvent> prune_nonzero_fraction(const ParamStore& params,
                                                   const Mask& current, double p) {
    if (p < 0.0 || p >= 100.0) {
        throw ConfigError("prune percentage must lie in [0,100), got " + std::to_string(p));
    }
    if (current.size() != params.prunable_size()) {
        throw ShapeError("mask does not match parameter store");
    }
    const std::vector<float> mags = gather_prunable_magnitudes(params);

    // Pool = currently unmasked coordinates (|theta| != 0 after rewind).
    std::vector<std::int64_t> pool;
    for (std::int64_t i = 0; i < current.size(); ++i) {
        if (current.bits[static_cast<std::size_t>(i)]) pool.push_back(i);
    }
    const std::int64_t k =
        std::llround(p / 100.0 * static_cast<double>(pool.size()));

    Mask mask = current;
    const double tau = mask_k_smallest(mask, mags, pool, k);

    PruneEvent ev = make_event(mask, p, tau);
    return {std::move(mask), std::move(ev)};
}

} // namespace asni
