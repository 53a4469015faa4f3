#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "asni/tensor.hpp"

namespace asni {

struct ParamEntry {
    std::string name;
    Tensor tensor;
    bool prunable = false; // false exactly for bias tensors
    int layer_index = -1;  // index into NetworkSpec::layers
};

// Named, ordered registry of per-layer parameter tensors.
class ParamStore {
public:
    ParamStore() = default;

    void add(ParamEntry entry);

    std::size_t size() const { return entries_.size(); }
    ParamEntry& entry(std::size_t i) { return entries_[i]; }
    const ParamEntry& entry(std::size_t i) const { return entries_[i]; }

    // Throws if absent.
    const ParamEntry& by_name(const std::string& name) const;
    ParamEntry& by_name(const std::string& name);
    bool contains(const std::string& name) const;

    // Number of prunable coordinates, flattened in entry order; stable across a run.
    std::int64_t prunable_size() const;
    std::int64_t total_size() const;

    // Indices of the prunable entries, in order. One per "layer" l = 1..L.
    std::vector<std::size_t> prunable_entries() const;

    // Start offset of each prunable entry inside the flattened prunable vector.
    std::vector<std::int64_t> prunable_offsets() const;

    bool all_finite() const;

    auto begin() { return entries_.begin(); }
    auto end() { return entries_.end(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

private:
    std::vector<ParamEntry> entries_;
};

// Binary vector over the flattened prunable parameters. 0 marks a pruned
// coordinate. Carries the per-layer offsets so reports can slice it.
struct Mask {
    std::vector<std::uint8_t> bits;
    std::vector<std::int64_t> layer_offsets; // start per prunable entry, plus total sentinel

    static Mask all_ones(const ParamStore& params);

    std::int64_t size() const { return static_cast<std::int64_t>(bits.size()); }
    std::int64_t popcount() const;

    // Bits for prunable layer l (index into prunable_entries order).
    std::pair<std::int64_t, std::int64_t> layer_span(std::size_t l) const;
};

// theta <- theta ⊙ mask over prunable coordinates. Biases untouched.
void apply_mask(ParamStore& params, const Mask& mask);

// Copy of `params` restricted to mask support (biases preserved).
ParamStore masked_copy(const ParamStore& params, const Mask& mask);

} // namespace asni
