#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asni/checkpoint.hpp"
#include "asni/config.hpp"
#include "asni/data.hpp"

namespace asni {

struct VariantSummary {
    Variant variant;
    double test_accuracy = 0.0;
    double sparsity_pct = 0.0;
    std::int64_t nonzeros = 0;
    double seconds = 0.0; // wall time; reported on the log, never in artifacts
};

// Deterministic one-line form (no wall time).
std::string summary_line(const VariantSummary& s);

// Executes the requested variants in order (t1d, asni1, asni2, t1s), writing
// per-variant metrics CSVs and checkpoints under
// {out_dir}/{combo|custom}_seed{seed}/. asni2/t1s run ASNI-I as a silent
// prerequisite when it is not itself requested; only requested variants leave
// artifacts. Progress goes to stderr.
std::vector<VariantSummary> run_experiment(const ExperimentConfig& config);

// Directory the artifacts of `config` land in.
std::string run_dir(const ExperimentConfig& config);

// Top-1 accuracy of a checkpoint on a dataset split. The architecture is
// reconstructed from the checkpoint's config echo and must match the data.
double evaluate(const Checkpoint& ckpt, const Dataset& dataset);

// Parses the flat config text echoed into a checkpoint.
ExperimentConfig config_from_echo(const std::string& echo);

} // namespace asni
