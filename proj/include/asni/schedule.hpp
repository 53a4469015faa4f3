#pragma once

namespace asni {

// Sigmoid sparsity schedule p(e) = alpha * sigmoid((e - beta*E) / gamma).
// alpha sets the final sparsity, beta centres the transition, gamma controls
// the slope. p is strictly increasing in e and stays inside (0, alpha).
struct SparsitySchedule {
    double alpha = 0.0; // in (0, 100)
    double beta = 0.5;  // in (0, 1)
    double gamma = 1.0; // > 0
    int total_epochs = 0;

    SparsitySchedule() = default;
    SparsitySchedule(double alpha, double beta, double gamma, int total_epochs);
};

// Target global sparsity percentage at epoch e (1-based).
double sparsity_at(const SparsitySchedule& schedule, int epoch);

} // namespace asni
