#include "asni/optim.hpp"

#include <cmath>
#include <string>

#include "asni/errors.hpp"

namespace asni {

OptimizerState::OptimizerState(const OptimizerConfig& config, const ParamStore& params)
    : config_(config) {
    const std::size_t slots = config.kind == OptimizerKind::adam ? 2 : 1;
    buffers_.resize(slots);
    for (auto& slot : buffers_) {
        slot.reserve(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            slot.push_back(Tensor::zeros(params.entry(i).tensor.shape));
        }
    }
}

void OptimizerState::step(ParamStore& params, const Gradients& grads, const Mask& mask,
                          double lr) {
    if (grads.tensors.size() != params.size()) {
        throw ShapeError("gradient set has " + std::to_string(grads.tensors.size()) +
                         " tensors for " + std::to_string(params.size()) + " parameters");
    }
    if (mask.size() != params.prunable_size()) {
        throw ShapeError("mask length " + std::to_string(mask.size()) +
                         " does not match prunable parameter count " +
                         std::to_string(params.prunable_size()));
    }
    if (lr <= 0.0) throw ConfigError("learning rate must be positive");

    ++t_;
    const float flr = static_cast<float>(lr);
    const float wd = static_cast<float>(config_.weight_decay);

    std::int64_t mask_at = 0;
    for (std::size_t ei = 0; ei < params.size(); ++ei) {
        ParamEntry& e = params.entry(ei);
        if (!e.tensor.same_shape(grads.tensors[ei])) {
            throw ShapeError("gradient shape mismatch for '" + e.name + "'");
        }
        float* theta = e.tensor.ptr();
        const float* g = grads.tensors[ei].ptr();
        const std::int64_t n = e.tensor.numel();
        const std::uint8_t* mbits =
            e.prunable ? mask.bits.data() + mask_at : nullptr;

        if (config_.kind == OptimizerKind::sgd_momentum) {
            const float mu = static_cast<float>(config_.momentum);
            float* vel = buffers_[0][ei].ptr();
            for (std::int64_t i = 0; i < n; ++i) {
                const float m = mbits ? static_cast<float>(mbits[i]) : 1.0f;
                const float gm = g[i] * m;
                vel[i] = mu * vel[i] + gm;
                float delta = -flr * vel[i];
                if (mbits && wd != 0.0f) delta -= flr * wd * theta[i];
                theta[i] += delta * m;
            }
        } else {
            const float b1 = static_cast<float>(config_.beta1);
            const float b2 = static_cast<float>(config_.beta2);
            const float eps = static_cast<float>(config_.epsilon);
            const float bc1 =
                1.0f - static_cast<float>(std::pow(config_.beta1, static_cast<double>(t_)));
            const float bc2 =
                1.0f - static_cast<float>(std::pow(config_.beta2, static_cast<double>(t_)));
            float* m1 = buffers_[0][ei].ptr();
            float* m2 = buffers_[1][ei].ptr();
            for (std::int64_t i = 0; i < n; ++i) {
                const float m = mbits ? static_cast<float>(mbits[i]) : 1.0f;
                const float gm = g[i] * m;
                m1[i] = b1 * m1[i] + (1.0f - b1) * gm;
                m2[i] = b2 * m2[i] + (1.0f - b2) * gm * gm;
                const float mhat = m1[i] / bc1;
                const float vhat = m2[i] / bc2;
                float delta = -flr * mhat / (std::sqrt(vhat) + eps);
                if (mbits && wd != 0.0f) delta -= flr * wd * theta[i];
                theta[i] += delta * m;
            }
        }
        if (e.prunable) mask_at += n;
    }
}

LrSchedule LrSchedule::constant(double eta0, int total_epochs) {
    return {LrKind::constant, eta0, 0.0, total_epochs, 0};
}

LrSchedule LrSchedule::cosine(double eta0, double delta, int total_epochs) {
    return {LrKind::cosine, eta0, delta, total_epochs, 0};
}

LrSchedule LrSchedule::cosine_warmup(double eta0, double delta, int total_epochs,
                                     int warmup_epochs) {
    return {LrKind::cosine_warmup, eta0, delta, total_epochs, warmup_epochs};
}

double cosine_rate(double eta0, double delta, int total_epochs, double epoch) {
    return eta0 * std::cos((M_PI / 2.0) * epoch /
                           ((1.0 + delta) * static_cast<double>(total_epochs)));
}

double lr_at(const LrSchedule& schedule, int epoch) {
    if (epoch < 1 || epoch > schedule.total_epochs) {
        throw ConfigError("epoch " + std::to_string(epoch) + " outside schedule range [1," +
                          std::to_string(schedule.total_epochs) + "]");
    }
    switch (schedule.kind) {
        case LrKind::constant:
            return schedule.eta0;
        case LrKind::cosine:
            return cosine_rate(schedule.eta0, schedule.delta, schedule.total_epochs, epoch);
        case LrKind::cosine_warmup: {
            if (epoch <= schedule.warmup_epochs) {
                return schedule.eta0 * static_cast<double>(epoch) /
                       static_cast<double>(schedule.warmup_epochs);
            }
            return cosine_rate(schedule.eta0, schedule.delta, schedule.total_epochs,
                               static_cast<double>(epoch - schedule.warmup_epochs));
        }
    }
    throw ConfigError("unknown learning-rate schedule kind");
}

} // namespace asni
