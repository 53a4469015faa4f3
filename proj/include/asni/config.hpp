#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asni/layers.hpp"
#include "asni/optim.hpp"
#include "asni/schedule.hpp"
#include "asni/training.hpp"

namespace asni {

enum class Variant { t1d, asni1, asni2, t1s };

std::string variant_name(Variant v);
std::vector<Variant> parse_variants(const std::string& names); // "all" or comma list

// Fully resolved experiment description. Serializes to flat `key = value`
// text; the same text is echoed into checkpoints for provenance.
struct ExperimentConfig {
    int combo = 0; // 0 = custom
    std::string dataset = "mnist";
    std::string arch = "fc";
    std::uint64_t seed = 1;
    std::vector<Variant> variants = {Variant::t1d, Variant::asni1, Variant::asni2,
                                     Variant::t1s};

    int epochs = 1;
    std::int64_t batch_size = 1;

    OptimizerKind optimizer = OptimizerKind::adam;
    double lr = 1e-3;
    double weight_decay = 0.0;
    double momentum = 0.9;

    LrKind lr_kind = LrKind::constant;
    double lr_delta = 0.0;
    int warmup_epochs = 0;

    double alpha = 0.0;  // final-sparsity control
    double beta = 0.5;   // paper default
    double gamma = -1.0; // -1 = derive E/10

    std::string data_dir;
    std::string out_dir = "runs";

    // Throws ConfigError on out-of-range fields; resolves gamma = E/10 default.
    void validate_and_resolve();

    std::string to_flat_text() const;

    NetworkSpec make_spec() const;
    LrSchedule make_lr_schedule() const;
    TrainerConfig make_trainer() const;
    SparsitySchedule make_sparsity_schedule() const;
};

// Table-row data for a preset combo: the declared hyperparameters plus the
// expected parameter count and iterations per epoch used for validation.
struct PresetInfo {
    int combo;
    const char* dataset;
    const char* arch;
    std::int64_t param_count;
    int epochs;
    std::int64_t batch_size;
    double lr;
    double weight_decay;
    std::int64_t iters_per_epoch;
    double alpha;
    double gamma;
};

const PresetInfo& preset_info(int combo); // combos 1..7
ExperimentConfig preset_config(int combo);

// Flat config file: `key = value` lines, '#' comments, blank lines ignored.
// Returns keys in file order. Throws DataError/ConfigError on bad input.
std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path);

// Applies one key=value onto the config. Unknown keys throw ConfigError.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

ExperimentConfig config_from_file(const std::string& path);

} // namespace asni
