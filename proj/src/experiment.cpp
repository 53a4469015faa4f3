#include "asni/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "asni/errors.hpp"
#include "asni/metrics.hpp"
#include "asni/network.hpp"

namespace asni {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::pair<Dataset, Dataset> load_data(const ExperimentConfig& config) {
    if (config.data_dir.empty()) {
        throw DataError(DataError::Kind::io, "no data directory configured (data.dir)");
    }
    if (config.dataset == "mnist") return load_mnist(config.data_dir);
    return load_cifar10(config.data_dir);
}

std::string echo_for(const ExperimentConfig& config, Variant v) {
    return config.to_flat_text() + "checkpoint.variant = " + variant_name(v) + "\n";
}

void write_variant_artifacts(const std::string& dir, const ExperimentConfig& config, Variant v,
                             const ParamStore& params, const std::optional<Mask>& mask,
                             const std::optional<CentroidSet>& centroids,
                             const std::vector<MetricsRecord>& metrics) {
    const std::string base = dir + "/" + variant_name(v);
    write_metrics_csv(base + "_metrics.csv", metrics);
    Checkpoint ckpt;
    ckpt.seed = config.seed;
    ckpt.config_echo = echo_for(config, v);
    ckpt.params = params;
    ckpt.mask = mask;
    ckpt.centroids = centroids;
    save_checkpoint(ckpt, base + ".ckpt");
}

} // namespace

std::string summary_line(const VariantSummary& s) {
    std::ostringstream os;
    os << variant_name(s.variant) << ": accuracy " << format_double(s.test_accuracy * 100.0)
       << "% sparsity " << format_double(s.sparsity_pct) << "% nonzeros " << s.nonzeros;
    return os.str();
}

std::string run_dir(const ExperimentConfig& config) {
    std::string label = config.combo > 0 ? "combo" + std::to_string(config.combo) : "custom";
    return config.out_dir + "/" + label + "_seed" + std::to_string(config.seed);
}

std::vector<VariantSummary> run_experiment(const ExperimentConfig& config) {
    const NetworkSpec spec = config.make_spec();
    if (config.combo > 0) {
        const PresetInfo& info = preset_info(config.combo);
        if (config.arch == info.arch && config.dataset == info.dataset &&
            spec.param_count() != info.param_count) {
            throw ConfigError("architecture '" + config.arch + "' has " +
                              std::to_string(spec.param_count()) + " parameters, preset " +
                              std::to_string(config.combo) + " expects " +
                              std::to_string(info.param_count));
        }
    }

    const auto [train, test] = load_data(config);
    const TrainerConfig trainer = config.make_trainer();

    const std::string dir = run_dir(config);
    std::filesystem::create_directories(dir);

    auto requested = [&](Variant v) {
        return std::find(config.variants.begin(), config.variants.end(), v) !=
               config.variants.end();
    };
    const bool needs_asni1 =
        requested(Variant::asni1) || requested(Variant::asni2) || requested(Variant::t1s);

    std::vector<VariantSummary> summaries;
    std::ofstream summary_file(dir + "/summary.txt", std::ios::binary);

    auto emit = [&](VariantSummary s) {
        summary_file << summary_line(s) << "\n";
        std::cerr << "[" << variant_name(s.variant) << "] " << summary_line(s) << " ("
                  << format_double(s.seconds) << " s)\n";
        summaries.push_back(std::move(s));
    };

    // T1-D: dense training, no schedule.
    if (requested(Variant::t1d)) {
        const double t0 = now_seconds();
        ParamStore params = build_network(spec, config.seed);
        const Mask dense_mask = Mask::all_ones(params);
        const auto metrics = train_fixed_mask(params, spec, train, test, trainer, dense_mask);
        write_variant_artifacts(dir, config, Variant::t1d, params, std::nullopt, std::nullopt,
                                metrics);
        VariantSummary s;
        s.variant = Variant::t1d;
        s.test_accuracy = metrics.back().test_accuracy;
        s.sparsity_pct = 0.0;
        s.nonzeros = params.prunable_size();
        s.seconds = now_seconds() - t0;
        emit(s);
    }

    // ASNI-I, also as a prerequisite of the amenable variants.
    std::optional<AsniResult> asni;
    std::optional<CentroidSet> centroids;
    if (needs_asni1) {
        const double t0 = now_seconds();
        ParamStore fresh = build_network(spec, config.seed);
        asni = asni_one_round(std::move(fresh), spec, train, test, trainer,
                              config.make_sparsity_schedule());
        centroids = extract_centroids(asni->theta_star);
        if (requested(Variant::asni1)) {
            write_variant_artifacts(dir, config, Variant::asni1, asni->theta_star, asni->mask,
                                    centroids, asni->metrics);
            VariantSummary s;
            s.variant = Variant::asni1;
            s.test_accuracy = asni->metrics.back().test_accuracy;
            s.nonzeros = asni->mask.popcount();
            s.sparsity_pct = 100.0 *
                             static_cast<double>(asni->mask.size() - s.nonzeros) /
                             static_cast<double>(asni->mask.size());
            s.seconds = now_seconds() - t0;
            emit(s);
        }
    }

    // T1-A-II: centroid-initialized amenable retraining.
    if (requested(Variant::asni2)) {
        const double t0 = now_seconds();
        const AmenableInit init = build_init(*centroids, asni->theta_star, asni->mask);
        const RetrainResult res = retrain_amenable(init, spec, train, test, trainer);
        write_variant_artifacts(dir, config, Variant::asni2, res.trained, init.mask, centroids,
                                res.metrics);
        VariantSummary s;
        s.variant = Variant::asni2;
        s.test_accuracy = res.test_accuracy;
        s.nonzeros = init.mask.popcount();
        s.sparsity_pct = 100.0 * static_cast<double>(init.mask.size() - s.nonzeros) /
                         static_cast<double>(init.mask.size());
        s.seconds = now_seconds() - t0;
        emit(s);
    }

    // T1-S: original-initialization amenable retraining.
    if (requested(Variant::t1s)) {
        const double t0 = now_seconds();
        const ParamStore theta0 = build_network(spec, config.seed); // seed-reproduced init
        const AmenableInit init = build_original_init(theta0, asni->mask);
        const RetrainResult res = retrain_amenable(init, spec, train, test, trainer);
        write_variant_artifacts(dir, config, Variant::t1s, res.trained, init.mask, std::nullopt,
                                res.metrics);
        VariantSummary s;
        s.variant = Variant::t1s;
        s.test_accuracy = res.test_accuracy;
        s.nonzeros = init.mask.popcount();
        s.sparsity_pct = 100.0 * static_cast<double>(init.mask.size() - s.nonzeros) /
                         static_cast<double>(init.mask.size());
        s.seconds = now_seconds() - t0;
        emit(s);
    }

    return summaries;
}

ExperimentConfig config_from_echo(const std::string& echo) {
    ExperimentConfig config;
    std::istringstream in(echo);
    std::string line;
    bool combo_seeded = false;
    std::vector<std::pair<std::string, std::string>> entries;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    for (const auto& [key, value] : entries) {
        if (key == "checkpoint.variant") continue;
        if (key == "run.combo" && value != "0" && !combo_seeded) {
            config = preset_config(std::stoi(value));
            combo_seeded = true;
        }
        apply_config_entry(config, key, value);
    }
    config.validate_and_resolve();
    return config;
}

double evaluate(const Checkpoint& ckpt, const Dataset& dataset) {
    const ExperimentConfig config = config_from_echo(ckpt.config_echo);
    const NetworkSpec spec = config.make_spec();
    std::vector<std::int64_t> expect = {dataset.size()};
    expect.insert(expect.end(), spec.input_shape.begin(), spec.input_shape.end());
    if (dataset.images.shape != expect) {
        throw ShapeError("dataset shape " + shape_to_string(dataset.images.shape) +
                         " does not match checkpoint architecture input " +
                         shape_to_string(expect));
    }
    return accuracy(ckpt.params, spec, dataset.images, dataset.labels);
}

} // namespace asni
