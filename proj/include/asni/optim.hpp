#pragma once

#include <cstdint>
#include <vector>

#include "asni/network.hpp"
#include "asni/param_store.hpp"

namespace asni {

enum class OptimizerKind { sgd_momentum, adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double momentum = 0.9;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0; // decoupled; prunable unmasked coordinates only
};

// Per-parameter buffers: velocity for SGD+M, first/second moments for Adam.
class OptimizerState {
public:
    OptimizerState(const OptimizerConfig& config, const ParamStore& params);

    // One update. The gradient is masked before it enters the moment buffers
    // and the parameter delta is masked again, so a masked coordinate and its
    // moments never move. Biases (non-prunable entries) ignore the mask.
    void step(ParamStore& params, const Gradients& grads, const Mask& mask, double lr);

    std::int64_t steps_taken() const { return t_; }
    const OptimizerConfig& config() const { return config_; }
    const Tensor& buffer(std::size_t slot, std::size_t entry) const {
        return buffers_[slot][entry];
    }

private:
    OptimizerConfig config_;
    // slot 0: velocity (SGD) or first moment (Adam); slot 1: second moment (Adam).
    std::vector<std::vector<Tensor>> buffers_;
    std::int64_t t_ = 0;
};

enum class LrKind { constant, cosine, cosine_warmup };

// Learning-rate policy over epochs 1..E. The cosine form is
// eta0 * cos((pi/2) * e / ((1+delta) * E)), positive on the whole range with
// delta setting the final rate. Warmup ramps linearly to eta0 over
// `warmup_epochs`, then follows the cosine re-phased to start at eta0.
struct LrSchedule {
    LrKind kind = LrKind::constant;
    double eta0 = 0.0;
    double delta = 0.0;
    int total_epochs = 0;
    int warmup_epochs = 0;

    static LrSchedule constant(double eta0, int total_epochs);
    static LrSchedule cosine(double eta0, double delta, int total_epochs);
    static LrSchedule cosine_warmup(double eta0, double delta, int total_epochs,
                                    int warmup_epochs);
};

// Rate for an epoch in [1, E]. Throws on out-of-range epochs.
double lr_at(const LrSchedule& schedule, int epoch);

// Raw quarter-period cosine value without range checks; cosine_rate(..., 0) == eta0.
double cosine_rate(double eta0, double delta, int total_epochs, double epoch);

} // namespace asni
