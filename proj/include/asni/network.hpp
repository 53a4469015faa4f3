#pragma once

#include <cstdint>
#include <vector>

#include "asni/batch.hpp"
#include "asni/layers.hpp"
#include "asni/param_store.hpp"

namespace asni {

// Fresh parameters for `spec`: weights from a Kaiming normal, N(0, 2/fan_in),
// biases zero. Bit-identical for a given seed.
ParamStore build_network(const NetworkSpec& spec, std::uint64_t seed);

// Class logits (B x C). Pure function of (params, batch).
Tensor forward(const ParamStore& params, const NetworkSpec& spec, const Batch& batch);

// Gradient tensors aligned one-to-one with ParamStore entries.
struct Gradients {
    std::vector<Tensor> tensors;
};

struct LossGrad {
    double loss = 0.0;
    Gradients grads;
};

// Softmax cross-entropy averaged over the batch, with gradients for every
// parameter tensor. Throws on out-of-range labels.
LossGrad loss_and_grad(const ParamStore& params, const NetworkSpec& spec, const Batch& batch);

// Fraction of test samples whose argmax logit matches the label; argmax ties
// break toward the lowest class index. `inputs` is (N, dims), evaluated in
// fixed-size chunks in index order.
double accuracy(const ParamStore& params, const NetworkSpec& spec, const Tensor& inputs,
                const std::vector<std::int32_t>& labels, std::int64_t chunk = 500);

} // namespace asni
