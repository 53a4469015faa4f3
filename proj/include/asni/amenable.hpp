#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asni/data.hpp"
#include "asni/metrics.hpp"
#include "asni/param_store.hpp"
#include "asni/training.hpp"

namespace asni {

// Per-layer signed centroids: the 2L numbers that initialize an amenable
// network. c_pos/c_neg are the arithmetic means of a layer's strictly
// positive / strictly negative entries; a layer with an empty pool gets 0.
struct CentroidSet {
    struct Row {
        std::string layer;
        double c_pos = 0.0;
        double c_neg = 0.0;
        std::int64_t n_pos = 0;
        std::int64_t n_neg = 0;
    };
    std::vector<Row> rows;

    std::size_t layer_count() const { return rows.size(); }
    // 2L stored reals: (c_pos, c_neg) per layer, in layer order.
    std::vector<double> values() const;
};

enum class InitProvenance { centroid, original };

// A sparse initialization: parameters whose prunable support equals the mask.
struct AmenableInit {
    ParamStore params;
    Mask mask;
    InitProvenance provenance = InitProvenance::centroid;
};

// Means over each prunable layer's positive/negative entries of the ASNI-I
// output. A layer missing one sign gets that centroid as 0 and a warning on
// stderr.
CentroidSet extract_centroids(const ParamStore& theta_star);

// Quantized initialization: coordinate i of layer l becomes c_pos[l] if
// theta_star_i > 0, c_neg[l] if < 0, and 0 where masked. Biases reset to 0.
// Throws if the mask support disagrees with theta_star's zeros.
AmenableInit build_init(const CentroidSet& centroids, const ParamStore& theta_star,
                        const Mask& mask);

// The T1-S variant's initialization: the original dense init masked down.
// Biases keep their original values.
AmenableInit build_original_init(const ParamStore& theta_orig, const Mask& mask);

struct RetrainResult {
    ParamStore trained;
    double test_accuracy = 0.0;
    std::vector<MetricsRecord> metrics;
};

// Trains the amenable network with its mask fixed for cfg.epochs.
RetrainResult retrain_amenable(const AmenableInit& init, const NetworkSpec& spec,
                               const Dataset& train, const Dataset& test,
                               const TrainerConfig& cfg);

} // namespace asni
