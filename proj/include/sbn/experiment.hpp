#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbn/construct.hpp"
#include "sbn/net.hpp"

// Error measurement and the reference error-vs-eps experiment (d = s = 2,
// j = 2, random targets, five eps values).

namespace sbn {

// Largest absolute entry difference; kernels must share d and s.
double max_abs_error(const Kernel& a, const Kernel& b);

// Row-wise projection into [eps,1-eps]^(2^s) (see clamp_row). Requires
// 0 < eps < 1/2^s. Idempotent; per-entry displacement <= 2^s*eps.
Kernel clamp_to_eps(const Kernel& k, double eps);

// Random row-stochastic kernel, rows ~ Dirichlet(1,...,1), generated from
// unit-rate exponentials keyed by (seed, trial, row, column).
Kernel random_kernel(int d, int s, std::uint64_t seed, std::uint64_t trial = 0);

struct ExperimentRow {
    double eps = 0;
    double alpha = 0;  // parameter magnitude bound at this eps
    double bound = 0;  // 1-(1-eps)^N + 2*eps
    double e_avg = 0;  // mean over trials of the per-trial max error
    double e_max = 0;  // max over trials
    std::string mode;  // "exact" or "sampled"
    int trials = 0;
    long long samples_per_input = 0; // 0 in exact mode
};

// For each eps: over `trials` random 4x4 targets, builds the deep overlaid
// network (d=s=2, j=2, 18 units), measures the max abs deviation of the
// exact kernel ("exact") or of empirical frequencies from samples_per_input
// ancestral samples per input row ("sampled") against the eps-projected
// target, and aggregates.
std::vector<ExperimentRow> table8(int trials, const std::vector<double>& eps_list,
                                  std::uint64_t seed, const std::string& mode,
                                  long long samples_per_input);

// Default eps list of the reference experiment: 2^-k/10 steps from 0.025
// down to 0.0015625.
std::vector<double> table8_default_eps();

// Plain-text rendering (10eps, alpha, bound, E_avg, E_max).
std::string format_experiment_table(const std::vector<ExperimentRow>& rows);

struct ArchChoice {
    enum class Kind { shallow_fixed, shallow_trainable, deep } kind = Kind::deep;
    int j = 0;                                                 // deep only
    DeepSchedule schedule = DeepSchedule::simplified;          // deep only
    TrainableVariant variant = TrainableVariant::anchored;     // trainable only
    double scale = 30.0;                                       // shallow only
};

// Exact error of the chosen construction against the same target projected
// at each eps; one value per eps.
std::vector<double> convergence_sweep(const Kernel& target, const ArchChoice& arch,
                                      const std::vector<double>& eps_list);

} // namespace sbn
