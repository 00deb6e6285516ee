#pragma once

#include <cstdint>
#include <vector>

#include "sbn/bits.hpp"

// Stochastic feedforward networks of sigmoid units. Layer l samples each of
// its units independently given the previous layer's state:
//   Pr(h_j = 1 | h_prev) = sigmoid(W_j . h_prev + b_j).
// A network with d inputs and s outputs realizes a 2^d x 2^s row-stochastic
// Markov kernel, computed here exactly by composing per-layer kernels.

namespace sbn {

double sigmoid(double t);
// Inverse of sigmoid; throws std::domain_error unless 0 < p < 1.
double logit(double p);

struct Layer {
    std::vector<std::vector<double>> W; // out_width rows, in_width columns
    std::vector<double> b;

    int out_width() const { return static_cast<int>(b.size()); }
    int in_width() const { return W.empty() ? 0 : static_cast<int>(W[0].size()); }
};

struct Network {
    int d = 0; // input width
    std::vector<Layer> layers;

    int out_width() const { return layers.empty() ? 0 : layers.back().out_width(); }
    // Units excluding inputs (hidden + output); the N in the error bound.
    long long total_units() const;
    long long hidden_units() const;
};

// Throws std::invalid_argument if layer widths do not chain together.
void check_network(const Network& net);

struct Kernel {
    int d = 0;
    int s = 0;
    std::vector<std::vector<double>> rows; // 2^d rows of 2^s entries
};

void check_kernel(const Kernel& k);

// Independent-unit distribution; unit_probs[i] = Pr(bit i+1 = 1).
struct ProductDistribution {
    std::vector<double> unit_probs;
};

// Full 2^n distribution of a ProductDistribution, indexed by dec().
std::vector<double> product_expand(const ProductDistribution& p);

// Exact kernel of a single layer (columns enumerate output states).
// Throws std::invalid_argument if in_width or out_width exceeds 20.
Kernel layer_kernel(const Layer& layer);

// Exact network kernel via sequential composition of layer kernels.
Kernel network_kernel(const Network& net);

// Row-stochastic matrix product; throws on dimension mismatch.
Kernel compose(const Kernel& a, const Kernel& b);

// Exponential-time oracle: sums p(y|h^L)...p(h^1|x) over every hidden state
// tuple explicitly. Throws if the network has more than 24 hidden units.
Kernel network_kernel_bruteforce(const Network& net);

// n ancestral samples from input x; returns counts per output state (indexed
// by dec). Unit draws are keyed by (seed, sample, layer, unit), so results
// are reproducible and order-independent.
std::vector<std::uint64_t> sample(const Network& net, const BitVec& x, long long n,
                                  std::uint64_t seed);

// Mutual information in bits of a joint distribution (rows: X, cols: Y).
// Entries must be nonnegative and sum to 1 within 1e-9.
double mutual_information(const std::vector<std::vector<double>>& joint);

// Projects a distribution row into [eps, 1-eps]^K keeping the sum exactly 1:
// low entries are raised to eps and the added mass is taken from the others
// proportionally to their surplus above eps. Requires eps*K < 1.
void clamp_row(std::vector<double>& row, double eps);

} // namespace sbn
