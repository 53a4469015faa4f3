#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asni/checkpoint.hpp"

namespace asni {

// Fig. 5 style table: per prunable layer, how many parameters survived.
struct LayerSparsityReport {
    struct Row {
        std::string layer;
        std::int64_t total = 0;
        std::int64_t nonzeros = 0;
        double sparsity_pct = 0.0;
    };
    std::vector<Row> rows; // final row is the whole-network total
};

LayerSparsityReport layer_sparsity(const Checkpoint& ckpt);
std::string layer_sparsity_csv(const LayerSparsityReport& report);

// Uniform-bin histogram of parameter values, optionally restricted to one
// layer and/or to nonzero entries. Layer-scope histograms carry the stored
// centroid markers when the checkpoint has them.
struct Histogram {
    std::string scope;  // "network" or layer name
    std::string source; // dense-init / dense-trained / asni-sparse / amenable-retrained
    bool nonzeros_only = false;
    std::vector<double> edges;       // bins + 1, strictly increasing
    std::vector<std::int64_t> counts; // per bin
    std::optional<double> c_pos;
    std::optional<double> c_neg;

    std::int64_t total_count() const;
};

Histogram param_histogram(const Checkpoint& ckpt, const std::string& scope, int bins,
                          bool nonzeros_only);
std::string histogram_csv(const Histogram& h);

// Per-layer positive/negative pool statistics (population std). Layers with
// an empty pool are flagged and report zeros.
struct BimodalitySummary {
    struct Row {
        std::string layer;
        std::int64_t n_pos = 0;
        double pos_mean = 0.0;
        double pos_std = 0.0;
        std::int64_t n_neg = 0;
        double neg_mean = 0.0;
        double neg_std = 0.0;
        bool degenerate = false; // one of the pools is empty
    };
    std::vector<Row> rows;
};

BimodalitySummary bimodality_summary(const Checkpoint& ckpt);
std::string bimodality_csv(const BimodalitySummary& summary);

} // namespace asni
