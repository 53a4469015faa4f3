#include "asni/amenable.hpp"

#include <iostream>

#include "asni/errors.hpp"

namespace asni {

std::vector<double> CentroidSet::values() const {
    std::vector<double> v;
    v.reserve(rows.size() * 2);
    for (const auto& r : rows) {
        v.push_back(r.c_pos);
        v.push_back(r.c_neg);
    }
    return v;
}

CentroidSet extract_centroids(const ParamStore& theta_star) {
    CentroidSet set;
    for (const auto& e : theta_star) {
        if (!e.prunable) continue;
        CentroidSet::Row row;
        row.layer = e.name;
        double pos_sum = 0.0, neg_sum = 0.0;
        for (float v : e.tensor.data) {
            if (v > 0.0f) {
                pos_sum += v;
                ++row.n_pos;
            } else if (v < 0.0f) {
                neg_sum += v;
                ++row.n_neg;
            }
        }
        row.c_pos = row.n_pos > 0 ? pos_sum / static_cast<double>(row.n_pos) : 0.0;
        row.c_neg = row.n_neg > 0 ? neg_sum / static_cast<double>(row.n_neg) : 0.0;
        if (row.n_pos == 0) {
            std::cerr << "warning: layer '" << e.name
                      << "' has no positive survivors; its positive centroid is 0\n";
        }
        if (row.n_neg == 0) {
            std::cerr << "warning: layer '" << e.name
                      << "' has no negative survivors; its negative centroid is 0\n";
        }
        set.rows.push_back(std::move(row));
    }
    return set;
}

AmenableInit build_init(const CentroidSet& centroids, const ParamStore& theta_star,
                        const Mask& mask) {
    if (mask.size() != theta_star.prunable_size()) {
        throw ShapeError("mask length does not match theta* prunable size");
    }

    AmenableInit init;
    init.provenance = InitProvenance::centroid;
    init.mask = mask;
    init.params = theta_star;

    std::size_t layer = 0;
    std::int64_t at = 0;
    for (auto& e : init.params) {
        if (!e.prunable) {
            // Biases are re-initialized to zero.
            for (float& v : e.tensor.data) v = 0.0f;
            continue;
        }
        if (layer >= centroids.rows.size() || centroids.rows[layer].layer != e.name) {
            throw ConfigError("centroid table does not match layer '" + e.name + "'");
        }
        const float c_pos = static_cast<float>(centroids.rows[layer].c_pos);
        const float c_neg = static_cast<float>(centroids.rows[layer].c_neg);
        for (std::int64_t i = 0; i < e.tensor.numel(); ++i) {
            const float v = e.tensor.data[static_cast<std::size_t>(i)];
            const bool kept = mask.bits[static_cast<std::size_t>(at + i)] != 0;
            if (kept != (v != 0.0f)) {
                throw ShapeError("mask support mismatch at '" + e.name + "'[" +
                                 std::to_string(i) + "]");
            }
            float out = 0.0f;
            if (v > 0.0f) out = c_pos;
            else if (v < 0.0f) out = c_neg;
            e.tensor.data[static_cast<std::size_t>(i)] = out;
        }
        at += e.tensor.numel();
        ++layer;
    }
    return init;
}

AmenableInit build_original_init(const ParamStore& theta_orig, const Mask& mask) {
    if (mask.size() != theta_orig.prunable_size()) {
        throw ShapeError("mask length does not match original init prunable size");
    }
    AmenableInit init;
    init.provenance = InitProvenance::original;
    init.mask = mask;
    init.params = masked_copy(theta_orig, mask);
    return init;
}

RetrainResult retrain_amenable(const AmenableInit& init, const NetworkSpec& spec,
                               const Dataset& train, const Dataset& test,
                               const TrainerConfig& cfg) {
    RetrainResult result;
    result.trained = init.params;
    result.metrics = train_fixed_mask(result.trained, spec, train, test, cfg, init.mask);
    result.test_accuracy = accuracy(result.trained, spec, test.images, test.labels);
    return result;
}

} // namespace asni
