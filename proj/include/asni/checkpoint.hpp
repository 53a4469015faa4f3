#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "asni/amenable.hpp"
#include "asni/param_store.hpp"

namespace asni {

// Versioned binary snapshot of a run: parameters, optional mask, optional
// centroid table, config echo and seed. Serialization is canonical, so
// save -> load -> save reproduces identical bytes.
struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    std::uint64_t seed = 0;
    std::string config_echo;
    ParamStore params;
    std::optional<Mask> mask;
    std::optional<CentroidSet> centroids;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

} // namespace asni
