#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "asni/analysis.hpp"
#include "asni/errors.hpp"
#include "asni/experiment.hpp"
#include "asni/metrics.hpp"

namespace {

struct RunOptions {
    int combo = 0;
    std::string config_path;
    std::string variants = "all";
    std::uint64_t seed = 1;
    std::string seeds; // comma list for multi-seed summaries
    std::string data_dir;
    std::string out_dir;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& list) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        seeds.push_back(std::stoull(tok));
    }
    if (seeds.empty()) throw asni::ConfigError("empty seed list");
    return seeds;
}

int run_command(const RunOptions& opt) {
    asni::ExperimentConfig base;
    if (!opt.config_path.empty()) {
        base = asni::config_from_file(opt.config_path);
    } else if (opt.combo > 0) {
        base = asni::preset_config(opt.combo);
    } else {
        throw asni::ConfigError("run needs --combo N or --config PATH");
    }
    base.variants = asni::parse_variants(opt.variants);
    if (!opt.data_dir.empty()) base.data_dir = opt.data_dir;
    if (!opt.out_dir.empty()) base.out_dir = opt.out_dir;

    std::vector<std::uint64_t> seeds =
        opt.seeds.empty() ? std::vector<std::uint64_t>{opt.seed} : parse_seed_list(opt.seeds);

    // variant -> accuracies across seeds
    std::map<std::string, std::vector<double>> acc;
    for (std::uint64_t seed : seeds) {
        asni::ExperimentConfig config = base;
        config.seed = seed;
        config.validate_and_resolve();
        const auto summaries = asni::run_experiment(config);
        std::cout << "# seed " << seed << " -> " << asni::run_dir(config) << "\n";
        for (const auto& s : summaries) {
            std::cout << asni::summary_line(s) << "\n";
            acc[asni::variant_name(s.variant)].push_back(s.test_accuracy);
        }
    }

    if (seeds.size() > 1) {
        std::cout << "# mean +- std over " << seeds.size() << " seeds\n";
        for (const auto& [variant, values] : acc) {
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= static_cast<double>(values.size());
            double var = 0.0;
            for (double v : values) var += (v - mean) * (v - mean);
            var /= static_cast<double>(values.size());
            std::cout << variant << ": " << asni::format_double(mean * 100.0) << " +- "
                      << asni::format_double(std::sqrt(var) * 100.0) << "\n";
        }
    }
    return 0;
}

int evaluate_command(const std::string& ckpt_path, const std::string& data_dir,
                     const std::string& split) {
    const asni::Checkpoint ckpt = asni::load_checkpoint(ckpt_path);
    const asni::ExperimentConfig config = asni::config_from_echo(ckpt.config_echo);
    auto [train, test] = config.dataset == "mnist" ? asni::load_mnist(data_dir)
                                                   : asni::load_cifar10(data_dir);
    const asni::Dataset& ds = split == "train" ? train : test;
    const double acc = asni::evaluate(ckpt, ds);
    std::cout << "top1_accuracy " << asni::format_double(acc * 100.0) << "\n";
    return 0;
}

int report_command(const std::string& ckpt_path, bool histogram, bool bimodality,
                   const std::string& layer, int bins, bool nonzeros_only,
                   const std::string& out_path) {
    const asni::Checkpoint ckpt = asni::load_checkpoint(ckpt_path);
    std::string csv;
    if (histogram) {
        const std::string scope = layer.empty() ? "network" : layer;
        csv = asni::histogram_csv(asni::param_histogram(ckpt, scope, bins, nonzeros_only));
    } else if (bimodality) {
        csv = asni::bimodality_csv(asni::bimodality_summary(ckpt));
    } else {
        csv = asni::layer_sparsity_csv(asni::layer_sparsity(ckpt));
    }
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) throw asni::DataError(asni::DataError::Kind::io, "cannot write '" + out_path + "'");
        out << csv;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ASNI sparse-training engine"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "Train the requested variants of an experiment");
    run->add_option("--combo", run_opt.combo, "Preset combination 1-7");
    run->add_option("--config", run_opt.config_path, "Flat key=value config file");
    run->add_option("--variants", run_opt.variants, "all or comma list of t1d,asni1,asni2,t1s");
    run->add_option("--seed", run_opt.seed, "Single seed (default 1)");
    run->add_option("--seeds", run_opt.seeds, "Comma list of seeds; prints mean +- std");
    run->add_option("--data-dir", run_opt.data_dir, "Directory with the dataset files");
    run->add_option("--out-dir", run_opt.out_dir, "Artifact directory (default runs)");

    std::string eval_ckpt, eval_data, eval_split = "test";
    auto* eval = app.add_subcommand("evaluate", "Top-1 accuracy of a checkpoint");
    eval->add_option("ckpt", eval_ckpt, "Checkpoint path")->required();
    eval->add_option("--data-dir", eval_data, "Directory with the dataset files")->required();
    eval->add_option("--split", eval_split, "test (default) or train");

    std::string rep_ckpt, rep_layer, rep_out;
    bool rep_hist = false, rep_bimodal = false, rep_nonzeros = false;
    int rep_bins = 100;
    auto* rep = app.add_subcommand("report", "Sparsity/distribution reports as CSV");
    rep->add_option("ckpt", rep_ckpt, "Checkpoint path")->required();
    rep->add_flag("--histogram", rep_hist, "Parameter histogram instead of layer sparsity");
    rep->add_flag("--bimodality", rep_bimodal, "Per-layer signed pool statistics");
    rep->add_option("--layer", rep_layer, "Restrict the histogram to one weight tensor");
    rep->add_option("--bins", rep_bins, "Histogram bin count (default 100)");
    rep->add_flag("--nonzeros-only", rep_nonzeros, "Exclude exact zeros");
    rep->add_option("--out", rep_out, "Write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return run_command(run_opt);
        if (eval->parsed()) return evaluate_command(eval_ckpt, eval_data, eval_split);
        return report_command(rep_ckpt, rep_hist, rep_bimodal, rep_layer, rep_bins,
                              rep_nonzeros, rep_out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const asni::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const asni::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const asni::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const asni::ShapeError& e) {
        std::cerr << "shape error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
