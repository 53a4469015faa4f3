#include "asni/config.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "asni/errors.hpp"
#include "asni/metrics.hpp"

namespace asni {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::t1d: return "t1d";
        case Variant::asni1: return "asni1";
        case Variant::asni2: return "asni2";
        case Variant::t1s: return "t1s";
    }
    return "?";
}

std::vector<Variant> parse_variants(const std::string& names) {
    if (names == "all") {
        return {Variant::t1d, Variant::asni1, Variant::asni2, Variant::t1s};
    }
    std::vector<Variant> out;
    std::stringstream ss(names);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "t1d") out.push_back(Variant::t1d);
        else if (tok == "asni1") out.push_back(Variant::asni1);
        else if (tok == "asni2") out.push_back(Variant::asni2);
        else if (tok == "t1s") out.push_back(Variant::t1s);
        else throw ConfigError("unknown variant '" + tok + "'");
    }
    if (out.empty()) throw ConfigError("empty variant list");
    return out;
}

namespace {

// Table rows for the in-scope dataset/network combinations.
constexpr std::array<PresetInfo, 7> kPresets = {{
    {1, "mnist", "fc", 266610, 50, 60, 1.2e-3, 0.0, 1000, 98.0, 5.0},
    {2, "mnist", "conv2", 3317450, 20, 60, 2e-4, 0.0, 1000, 99.2, 2.0},
    {3, "mnist", "conv4", 1933258, 25, 60, 3e-4, 0.0, 1000, 98.5, 2.0},
    {4, "mnist", "conv6", 1802698, 30, 60, 3e-4, 0.0, 1000, 98.5, 3.0},
    {5, "cifar10", "conv2", 4301642, 20, 60, 2e-4, 0.0, 1000, 98.5, 2.0},
    {6, "cifar10", "conv4", 2425930, 25, 60, 3e-4, 0.0, 1000, 95.0, 2.0},
    {7, "cifar10", "conv6", 2262602, 30, 60, 3e-4, 0.0, 1000, 94.0, 3.0},
}};

std::string optimizer_name(OptimizerKind k) {
    return k == OptimizerKind::adam ? "adam" : "sgd_momentum";
}

std::string lr_kind_name(LrKind k) {
    switch (k) {
        case LrKind::constant: return "constant";
        case LrKind::cosine: return "cosine";
        case LrKind::cosine_warmup: return "cosine_warmup";
    }
    return "?";
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value '" + value + "' for key '" + key + "'");
    }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::int64_t v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value '" + value + "' for key '" + key + "'");
    }
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

const PresetInfo& preset_info(int combo) {
    if (combo < 1 || combo > static_cast<int>(kPresets.size())) {
        throw ConfigError("preset combo must lie in [1," + std::to_string(kPresets.size()) +
                          "], got " + std::to_string(combo));
    }
    return kPresets[static_cast<std::size_t>(combo - 1)];
}

ExperimentConfig preset_config(int combo) {
    const PresetInfo& info = preset_info(combo);
    ExperimentConfig cfg;
    cfg.combo = combo;
    cfg.dataset = info.dataset;
    cfg.arch = info.arch;
    cfg.epochs = info.epochs;
    cfg.batch_size = info.batch_size;
    cfg.optimizer = OptimizerKind::adam;
    cfg.lr = info.lr;
    cfg.weight_decay = info.weight_decay;
    cfg.lr_kind = LrKind::constant;
    cfg.alpha = info.alpha;
    cfg.beta = 0.5;
    cfg.gamma = info.gamma;
    cfg.validate_and_resolve();
    return cfg;
}

void ExperimentConfig::validate_and_resolve() {
    if (dataset != "mnist" && dataset != "cifar10") {
        throw ConfigError("unknown dataset '" + dataset + "'");
    }
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    if (batch_size < 1) throw ConfigError("batch size must be at least 1");
    if (lr <= 0.0) throw ConfigError("learning rate must be positive");
    if (variants.empty()) throw ConfigError("no variants selected");
    make_spec(); // validates arch/dataset composition
    if (gamma < 0.0) gamma = static_cast<double>(epochs) / 10.0;
    const bool wants_sparsity =
        std::any_of(variants.begin(), variants.end(), [](Variant v) { return v != Variant::t1d; });
    if (wants_sparsity) {
        make_sparsity_schedule(); // range-checks alpha/beta/gamma
    }
}

std::string ExperimentConfig::to_flat_text() const {
    std::ostringstream os;
    os << "format.version = 1\n";
    os << "run.combo = " << combo << "\n";
    os << "run.dataset = " << dataset << "\n";
    os << "run.arch = " << arch << "\n";
    os << "run.seed = " << seed << "\n";
    os << "run.variants = ";
    for (std::size_t i = 0; i < variants.size(); ++i) {
        if (i) os << ",";
        os << variant_name(variants[i]);
    }
    os << "\n";
    os << "data.normalize = scale_1_255\n";
    os << "train.epochs = " << epochs << "\n";
    os << "train.batch_size = " << batch_size << "\n";
    os << "optim.kind = " << optimizer_name(optimizer) << "\n";
    os << "optim.lr = " << format_double(lr) << "\n";
    os << "optim.weight_decay = " << format_double(weight_decay) << "\n";
    os << "optim.momentum = " << format_double(momentum) << "\n";
    os << "lr.kind = " << lr_kind_name(lr_kind) << "\n";
    os << "lr.delta = " << format_double(lr_delta) << "\n";
    os << "lr.warmup_epochs = " << warmup_epochs << "\n";
    os << "sparsity.alpha = " << format_double(alpha) << "\n";
    os << "sparsity.beta = " << format_double(beta) << "\n";
    os << "sparsity.gamma = " << format_double(gamma) << "\n";
    return os.str();
}

NetworkSpec ExperimentConfig::make_spec() const {
    std::vector<std::int64_t> input =
        dataset == "mnist" ? std::vector<std::int64_t>{1, 28, 28}
                           : std::vector<std::int64_t>{3, 32, 32};
    return make_architecture(arch, std::move(input));
}

LrSchedule ExperimentConfig::make_lr_schedule() const {
    switch (lr_kind) {
        case LrKind::constant: return LrSchedule::constant(lr, epochs);
        case LrKind::cosine: return LrSchedule::cosine(lr, lr_delta, epochs);
        case LrKind::cosine_warmup:
            return LrSchedule::cosine_warmup(lr, lr_delta, epochs, warmup_epochs);
    }
    throw ConfigError("unknown learning-rate kind");
}

TrainerConfig ExperimentConfig::make_trainer() const {
    TrainerConfig t;
    t.optimizer.kind = optimizer;
    t.optimizer.momentum = momentum;
    t.optimizer.weight_decay = weight_decay;
    t.lr_schedule = make_lr_schedule();
    t.epochs = epochs;
    t.batch_size = batch_size;
    t.shuffle_seed = seed;
    return t;
}

SparsitySchedule ExperimentConfig::make_sparsity_schedule() const {
    return SparsitySchedule(alpha, beta, gamma <= 0.0 ? static_cast<double>(epochs) / 10.0 : gamma,
                            epochs);
}

std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError(DataError::Kind::io, "cannot open config '" + path + "'");
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config '" + path + "' line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        }
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return entries;
}

void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value) {
    if (key == "format.version") {
        if (value != "1") throw ConfigError("unsupported config format version " + value);
    } else if (key == "run.combo") {
        config.combo = static_cast<int>(parse_int(key, value));
    } else if (key == "run.dataset") {
        config.dataset = value;
    } else if (key == "run.arch") {
        config.arch = value;
    } else if (key == "run.seed") {
        config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "run.variants") {
        config.variants = parse_variants(value);
    } else if (key == "data.normalize") {
        if (value != "scale_1_255") throw ConfigError("unsupported normalization '" + value + "'");
    } else if (key == "train.epochs") {
        config.epochs = static_cast<int>(parse_int(key, value));
    } else if (key == "train.batch_size") {
        config.batch_size = parse_int(key, value);
    } else if (key == "optim.kind") {
        if (value == "adam") config.optimizer = OptimizerKind::adam;
        else if (value == "sgd_momentum") config.optimizer = OptimizerKind::sgd_momentum;
        else throw ConfigError("unknown optimizer '" + value + "'");
    } else if (key == "optim.lr") {
        config.lr = parse_double(key, value);
    } else if (key == "optim.weight_decay") {
        config.weight_decay = parse_double(key, value);
    } else if (key == "optim.momentum") {
        config.momentum = parse_double(key, value);
    } else if (key == "lr.kind") {
        if (value == "constant") config.lr_kind = LrKind::constant;
        else if (value == "cosine") config.lr_kind = LrKind::cosine;
        else if (value == "cosine_warmup") config.lr_kind = LrKind::cosine_warmup;
        else throw ConfigError("unknown lr schedule '" + value + "'");
    } else if (key == "lr.delta") {
        config.lr_delta = parse_double(key, value);
    } else if (key == "lr.warmup_epochs") {
        config.warmup_epochs = static_cast<int>(parse_int(key, value));
    } else if (key == "sparsity.alpha") {
        config.alpha = parse_double(key, value);
    } else if (key == "sparsity.beta") {
        config.beta = parse_double(key, value);
    } else if (key == "sparsity.gamma") {
        config.gamma = parse_double(key, value);
    } else if (key == "data.dir") {
        config.data_dir = value;
    } else if (key == "out.dir") {
        config.out_dir = value;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

ExperimentConfig config_from_file(const std::string& path) {
    const auto entries = read_flat_config(path);
    // A combo line seeds the preset; later lines override it.
    ExperimentConfig config;
    for (const auto& [key, value] : entries) {
        if (key == "run.combo") {
            const int combo = static_cast<int>(parse_int(key, value));
            if (combo > 0) config = preset_config(combo);
            config.combo = combo;
        }
    }
    for (const auto& [key, value] : entries) {
        apply_config_entry(config, key, value);
    }
    config.validate_and_resolve();
    return config;
}

} // namespace asni
