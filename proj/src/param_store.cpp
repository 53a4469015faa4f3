#include "asni/param_store.hpp"

#include <algorithm>

#include "asni/errors.hpp"

namespace asni {

void ParamStore::add(ParamEntry entry) {
    if (contains(entry.name)) {
        throw ConfigError("duplicate parameter name '" + entry.name + "'");
    }
    entries_.push_back(std::move(entry));
}

const ParamEntry& ParamStore::by_name(const std::string& name) const {
    for (const auto& e : entries_) {
        if (e.name == name) return e;
    }
    throw ConfigError("no parameter named '" + name + "'");
}

ParamEntry& ParamStore::by_name(const std::string& name) {
    for (auto& e : entries_) {
        if (e.name == name) return e;
    }
    throw ConfigError("no parameter named '" + name + "'");
}

bool ParamStore::contains(const std::string& name) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const ParamEntry& e) { return e.name == name; });
}

std::int64_t ParamStore::prunable_size() const {
    std::int64_t n = 0;
    for (const auto& e : entries_) {
        if (e.prunable) n += e.tensor.numel();
    }
    return n;
}

std::int64_t ParamStore::total_size() const {
    std::int64_t n = 0;
    for (const auto& e : entries_) n += e.tensor.numel();
    return n;
}

std::vector<std::size_t> ParamStore::prunable_entries() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].prunable) out.push_back(i);
    }
    return out;
}

std::vector<std::int64_t> ParamStore::prunable_offsets() const {
    std::vector<std::int64_t> offsets;
    std::int64_t at = 0;
    for (const auto& e : entries_) {
        if (!e.prunable) continue;
        offsets.push_back(at);
        at += e.tensor.numel();
    }
    offsets.push_back(at);
    return offsets;
}

bool ParamStore::all_finite() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const ParamEntry& e) { return e.tensor.all_finite(); });
}

Mask Mask::all_ones(const ParamStore& params) {
    Mask m;
    m.bits.assign(static_cast<std::size_t>(params.prunable_size()), 1);
    m.layer_offsets = params.prunable_offsets();
    return m;
}

std::int64_t Mask::popcount() const {
    return std::count(bits.begin(), bits.end(), std::uint8_t{1});
}

std::pair<std::int64_t, std::int64_t> Mask::layer_span(std::size_t l) const {
    return {layer_offsets[l], layer_offsets[l + 1]};
}

void apply_mask(ParamStore& params, const Mask& mask) {
    if (mask.size() != params.prunable_size()) {
        throw ShapeError("mask length " + std::to_string(mask.size()) +
                         " does not match prunable parameter count " +
                         std::to_string(params.prunable_size()));
    }
    std::int64_t at = 0;
    for (auto& e : params) {
        if (!e.prunable) continue;
        float* p = e.tensor.ptr();
        const std::int64_t n = e.tensor.numel();
        for (std::int64_t i = 0; i < n; ++i) {
            if (!mask.bits[static_cast<std::size_t>(at + i)]) p[i] = 0.0f;
        }
        at += n;
    }
}

ParamStore masked_copy(const ParamStore& params, const Mask& mask) {
    ParamStore out = params;
    apply_mask(out, mask);
    return out;
}

} // namespace asni
