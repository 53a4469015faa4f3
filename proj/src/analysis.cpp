#include "asni/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "asni/errors.hpp"
#include "asni/metrics.hpp"

namespace asni {

namespace {

// Variant label recorded by the harness, mapped onto the distribution source.
std::string source_of(const Checkpoint& ckpt) {
    const std::string tag = "checkpoint.variant = ";
    const auto at = ckpt.config_echo.find(tag);
    if (at == std::string::npos) return "dense-init";
    const auto end = ckpt.config_echo.find('\n', at);
    const std::string variant =
        ckpt.config_echo.substr(at + tag.size(), end - at - tag.size());
    if (variant == "t1d") return "dense-trained";
    if (variant == "asni1") return "asni-sparse";
    if (variant == "asni2" || variant == "t1s") return "amenable-retrained";
    return "dense-init";
}

} // namespace

LayerSparsityReport layer_sparsity(const Checkpoint& ckpt) {
    LayerSparsityReport report;
    const auto prunable = ckpt.params.prunable_entries();

    std::vector<std::int64_t> nonzeros(prunable.size());
    if (ckpt.mask) {
        if (ckpt.mask->size() != ckpt.params.prunable_size()) {
            throw ShapeError("checkpoint mask does not match its parameters");
        }
        for (std::size_t l = 0; l < prunable.size(); ++l) {
            const auto [lo, hi] = ckpt.mask->layer_span(l);
            std::int64_t n = 0;
            for (std::int64_t i = lo; i < hi; ++i) {
                n += ckpt.mask->bits[static_cast<std::size_t>(i)];
            }
            nonzeros[l] = n;
        }
    } else {
        for (std::size_t l = 0; l < prunable.size(); ++l) {
            nonzeros[l] = ckpt.params.entry(prunable[l]).tensor.numel();
        }
    }

    std::int64_t total_all = 0, nonzero_all = 0;
    for (std::size_t l = 0; l < prunable.size(); ++l) {
        const auto& e = ckpt.params.entry(prunable[l]);
        LayerSparsityReport::Row row;
        row.layer = e.name;
        row.total = e.tensor.numel();
        row.nonzeros = nonzeros[l];
        row.sparsity_pct =
            100.0 * static_cast<double>(row.total - row.nonzeros) / static_cast<double>(row.total);
        total_all += row.total;
        nonzero_all += row.nonzeros;
        report.rows.push_back(std::move(row));
    }

    LayerSparsityReport::Row net;
    net.layer = "network";
    net.total = total_all;
    net.nonzeros = nonzero_all;
    net.sparsity_pct =
        total_all > 0
            ? 100.0 * static_cast<double>(total_all - nonzero_all) / static_cast<double>(total_all)
            : 0.0;
    report.rows.push_back(std::move(net));
    return report;
}

std::string layer_sparsity_csv(const LayerSparsityReport& report) {
    std::ostringstream os;
    os << "layer,total,nonzeros,sparsity_pct\n";
    for (const auto& r : report.rows) {
        os << r.layer << "," << r.total << "," << r.nonzeros << ","
           << format_double(r.sparsity_pct) << "\n";
    }
    return os.str();
}

std::int64_t Histogram::total_count() const {
    std::int64_t n = 0;
    for (auto c : counts) n += c;
    return n;
}

Histogram param_histogram(const Checkpoint& ckpt, const std::string& scope, int bins,
                          bool nonzeros_only) {
    if (bins < 2) throw ConfigError("histogram needs at least 2 bins");

    Histogram h;
    h.scope = scope;
    h.source = source_of(ckpt);
    h.nonzeros_only = nonzeros_only;

    // Gather inspected values.
    std::vector<float> values;
    if (scope == "network") {
        for (const auto& e : ckpt.params) {
            if (!e.prunable) continue;
            for (float v : e.tensor.data) {
                if (!nonzeros_only || v != 0.0f) values.push_back(v);
            }
        }
    } else {
        const ParamEntry& e = ckpt.params.by_name(scope); // throws on unknown layer
        if (!e.prunable) throw ConfigError("'" + scope + "' is not a prunable weight tensor");
        for (float v : e.tensor.data) {
            if (!nonzeros_only || v != 0.0f) values.push_back(v);
        }
        if (ckpt.centroids) {
            for (const auto& row : ckpt.centroids->rows) {
                if (row.layer == scope) {
                    h.c_pos = row.c_pos;
                    h.c_neg = row.c_neg;
                }
            }
        }
    }
    if (values.empty()) throw ConfigError("histogram scope '" + scope + "' has no values");

    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + width * i;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (float v : values) {
        auto bin = static_cast<std::int64_t>((static_cast<double>(v) - lo) / width);
        bin = std::clamp<std::int64_t>(bin, 0, bins - 1);
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    return h;
}

std::string histogram_csv(const Histogram& h) {
    std::ostringstream os;
    os << "# scope=" << h.scope << " source=" << h.source
       << " nonzeros_only=" << (h.nonzeros_only ? 1 : 0) << "\n";
    const bool markers = h.c_pos.has_value() && h.c_neg.has_value();
    os << "bin_center,count";
    if (markers) os << ",c_pos,c_neg";
    os << "\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        os << format_double(0.5 * (h.edges[i] + h.edges[i + 1])) << "," << h.counts[i];
        if (markers) os << "," << format_double(*h.c_pos) << "," << format_double(*h.c_neg);
        os << "\n";
    }
    return os.str();
}

BimodalitySummary bimodality_summary(const Checkpoint& ckpt) {
    BimodalitySummary summary;
    for (const auto& e : ckpt.params) {
        if (!e.prunable) continue;
        BimodalitySummary::Row row;
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
        row.pos_mean = row.n_pos > 0 ? pos_sum / static_cast<double>(row.n_pos) : 0.0;
        row.neg_mean = row.n_neg > 0 ? neg_sum / static_cast<double>(row.n_neg) : 0.0;
        double pos_sq = 0.0, neg_sq = 0.0;
        for (float v : e.tensor.data) {
            if (v > 0.0f) {
                pos_sq += (v - row.pos_mean) * (v - row.pos_mean);
            } else if (v < 0.0f) {
                neg_sq += (v - row.neg_mean) * (v - row.neg_mean);
            }
        }
        row.pos_std = row.n_pos > 0 ? std::sqrt(pos_sq / static_cast<double>(row.n_pos)) : 0.0;
        row.neg_std = row.n_neg > 0 ? std::sqrt(neg_sq / static_cast<double>(row.n_neg)) : 0.0;
        row.degenerate = row.n_pos == 0 || row.n_neg == 0;
        summary.rows.push_back(std::move(row));
    }
    return summary;
}

std::string bimodality_csv(const BimodalitySummary& summary) {
    std::ostringstream os;
    os << "# std=population\n";
    os << "layer,n_pos,pos_mean,pos_std,n_neg,neg_mean,neg_std,degenerate\n";
    for (const auto& r : summary.rows) {
        os << r.layer << "," << r.n_pos << "," << format_double(r.pos_mean) << ","
           << format_double(r.pos_std) << "," << r.n_neg << "," << format_double(r.neg_mean)
           << "," << format_double(r.neg_std) << "," << (r.degenerate ? 1 : 0) << "\n";
    }
    return os.str();
}

} // namespace asni
