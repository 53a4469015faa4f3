#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace asni {

// One row per training epoch. Deliberately excludes wall time so that two
// runs with the same (config, seed) emit byte-identical CSVs; timing is
// reported on the run log instead.
struct MetricsRecord {
    int epoch = 0;
    double train_loss = 0.0;
    double test_accuracy = 0.0;
    double p = 0.0;     // sparsity percentage in effect after this epoch
    double tau_g = 0.0; // global threshold of the epoch's prune (0 when none)
    std::int64_t nonzeros = 0;
    double lr = 0.0;
};

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& r);
void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records);

// Locale-independent shortest round-trip formatting used across all CSVs.
std::string format_double(double v);

} // namespace asni
