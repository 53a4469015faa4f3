#include "asni/schedule.hpp"

#include <cmath>
#include <string>

#include "asni/errors.hpp"

namespace asni {

SparsitySchedule::SparsitySchedule(double alpha_, double beta_, double gamma_, int total_epochs_)
    : alpha(alpha_), beta(beta_), gamma(gamma_), total_epochs(total_epochs_) {
    if (!(alpha > 0.0 && alpha < 100.0)) {
        throw ConfigError("sparsity alpha must lie in (0,100), got " + std::to_string(alpha));
    }
    if (!(beta > 0.0 && beta < 1.0)) {
        throw ConfigError("sparsity beta must lie in (0,1), got " + std::to_string(beta));
    }
    if (!(gamma > 0.0)) {
        throw ConfigError("sparsity gamma must be positive, got " + std::to_string(gamma));
    }
    if (total_epochs < 1) {
        throw ConfigError("schedule needs at least one epoch");
    }
}

double sparsity_at(const SparsitySchedule& schedule, int epoch) {
    const double z = (static_cast<double>(epoch) -
                      schedule.beta * static_cast<double>(schedule.total_epochs)) /
                     schedule.gamma;
    return schedule.alpha / (1.0 + std::exp(-z));
}

} // namespace asni
