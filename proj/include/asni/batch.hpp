#pragma once

#include <cstdint>
#include <vector>

#include "asni/tensor.hpp"

namespace asni {

// One mini-batch: inputs (B, per-sample dims) and integer labels of length B.
struct Batch {
    Tensor inputs;
    std::vector<std::int32_t> labels;

    std::int64_t size() const { return static_cast<std::int64_t>(labels.size()); }
};

} // namespace asni
