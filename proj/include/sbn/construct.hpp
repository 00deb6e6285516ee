#pragma once

#include <utility>
#include <vector>

#include "sbn/bits.hpp"
#include "sbn/net.hpp"

// Constructions that realize an arbitrary target kernel K: {0,1}^d -> {0,1}^s
// with a sigmoid network whose exact kernel is within 1-(1-eps)^N + 2*eps of
// the target (N = number of non-input units), plus shallow variants.

namespace sbn {

// Architecture report for the deep construction with 2^j parallel sections.
struct ArchPlan {
    int d = 0, s = 0, j = 0;
    int b = -1;                    // subcube rank when s = 2^(b-1)+b, else -1
    int depth_overlaid = -1;       // hidden layers, overlaid schedule (-1 if unavailable)
    int depth_simplified = 0;      // hidden layers, single-code schedule
    int width = 0;                 // hidden layer width 2^j*(s+d-j)
    long long unit_count = 0;      // N for the preferred depth (hidden + s)
    long long trainable_params = 0;    // 2^d*(2^s-1)
    long long full_params = 0;         // every weight and bias entry
    long long shallow_fixed_width = 0;     // 2^(d-1)*(2^s-1), d=0: 2^s-1
    long long shallow_trainable_width = 0; // 2^d*2^(s-1) anchored; d=0: 2^(s-1)-1
};

ArchPlan plan(int d, int s, int j);

// Hyperplane through the pair {x1,x2} (must differ in exactly one bit):
// returns (w,c) with w.x+c = 0 on the pair and <= -1 on every other vertex.
std::pair<std::vector<double>, double> edge_hyperplane(const BitVec& x1, const BitVec& x2);

// Deterministic orthant decoder: unit weights W (s rows, 2^s-1 columns) and
// bias -1 such that for z with largest set index l, sign(Wz+b) lands in the
// orthant of bin_s(l). Column l is 2^(l+1)*(bin_s(l)-1/2).
std::pair<std::vector<std::vector<double>>, std::vector<double>> orthant_map_weights(int s);

// Firing probabilities p (length 2^s-1) such that pushing the independent
// vector z ~ prod Bernoulli(p_i) through y = bin_s(largest unset index of z)
// reproduces q exactly. Requires q interior (all entries > 0).
ProductDistribution invert_product_chain(const std::vector<double>& q);

// Move probabilities for walking a Gray code: state code[t] advances to
// code[t+1] with probability rho[t], leaving exactly target mass behind.
// target_row is indexed by dec(); throws if the remaining mass underflows.
std::vector<double> invert_sharing_chain(const std::vector<double>& target_row,
                                         const GrayCode& code);

// One mass-sharing step on m units.
struct SharingStep {
    BitVec g;       // state whose mass is being split
    BitVec g_hat;   // paired state, Hamming distance 1 from g in a bit != unit
    int unit = 1;   // treated unit i, 1-based
    double rho = 0.5;     // Pr(unit_i = 1 | g)
    double rho_hat = 0.5; // Pr(unit_i = 1 | g_hat)
};

// Layer applying one paired sharing step: unit i fires with probability
// rho_eps on g and rho_hat_eps on g_hat; every other unit copies itself with
// probability 1-eps, and every state outside {g,g_hat} keeps bit i with
// probability >= 1-eps. rho values are clamped into [eps,1-eps].
Layer sharing_layer(int m, const SharingStep& step, double eps);

// All m units copy themselves with probability 1-eps (W = 2*gamma*I, b = -gamma).
Layer copy_layer(int m, double eps);

// First layer of the deep construction: 2^j sections of width s+d-j. In
// section tau the first unit fires (prob 1-eps) exactly when the first j
// input bits equal bin(tau-1,j); the remaining s-1 section units rest at 0
// and the last d-j units copy input bits j+1..d (each prob 1-eps).
Layer gate_layer(int d, int s, int j, double eps);

// Output layer: s units, unit i ORs the i-th unit of every section's first
// block (weight 2*gamma, bias -gamma).
Layer or_output_layer(int d, int s, int j, double eps);

enum class DeepSchedule {
    simplified, // one Gray code, 2^(d+s-j) hidden layers (j=d: one fewer)
    overlaid,   // 2^b partial codes advance together; needs s = 2^(b-1)+b
};

// Deep construction: exact kernel within 1-(1-eps)^N + 2*eps of the target
// (projected to [eps,1-eps]). Exactly 2^d*(2^s-1) parameter entries depend
// on the target, one per sharing step.
Network build_deep(const Kernel& target, int j, double eps,
                   DeepSchedule schedule = DeepSchedule::simplified);

// Single hidden layer of 2^max(d-1,0)*(2^s-1) units; all parameters fixed
// by the target. `scale` is the saturation weight for the deterministic
// decoder part (larger = closer to the eps-free ideal).
Network build_shallow_fixed(const Kernel& target, double eps, double scale);

enum class TrainableVariant {
    literal,  // bias-only hidden chain; d>=1 shares the output bias across inputs
    anchored, // per-input gated blocks with an anchor unit carrying the block bias
};

// Single hidden layer whose hidden parameters are target-independent given
// the chain probabilities; the output row of unit 1 carries the trainable
// weights, tuned column-pair by column-pair via bisection.
Network build_shallow_trainable(const Kernel& target, double eps, double scale,
                                TrainableVariant variant);

// 1-(1-eps)^N + 2*eps
double error_bound(double eps, long long N);

// Max parameter magnitude 2*m*logit(1-eps) used by the deep construction,
// m = max(j, s+d-j).
double alpha_for_eps(double eps, int m);

struct ValidationRule {
    std::string id;
    bool flagged = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationRule> rules;
    bool ok = true; // false when any rule is flagged
};

// Capacity screens for a proposed architecture: parameter budget below
// 2^d*(2^s-1), any hidden layer narrower than min(d,s), and a last hidden
// layer narrower than s (s odd or d>=1) or s-1 (s even, d=0).
// param_count < 0 means unknown (rule skipped).
ValidationReport validate_arch(int d, int s, const std::vector<int>& hidden_widths,
                               long long param_count);

} // namespace sbn
