#include "sbn/construct.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace sbn {

namespace {

double logit_eps(double rho, double eps) {
    return logit(std::min(std::max(rho, eps), 1.0 - eps));
}

// Affine functional over a layer's input state, accumulated into one row.
struct AffineRow {
    std::vector<double> w;
    double c = 0.0;
    explicit AffineRow(int in_width) : w(in_width, 0.0) {}
    // += coef * [h_k == bit]   (k 0-based)
    void add_indicator(int k, int bit, double coef) {
        if (bit)
            w[k] += coef;
        else {
            c += coef;
            w[k] -= coef;
        }
    }
};

// Unpaired sharing step: unit i fires with rho_eps exactly on g; every other
// state copies bit i with probability >= 1-eps. The trainable rho lands in
// the bias alone.
AffineRow single_step_row(const BitVec& g, int i, double rho, double eps) {
    const int m = static_cast<int>(g.size());
    const double gamma = logit(1.0 - eps);
    const double sg = g[i] ? -1.0 : 1.0;
    AffineRow row(m);
    row.c = logit_eps(rho, eps);
    row.add_indicator(i, g[i] ? 0 : 1, sg * 2.0 * gamma * m);
    for (int k = 0; k < m; ++k)
        if (k != i) row.add_indicator(k, g[k] ? 0 : 1, -sg * 2.0 * gamma);
    return row;
}

// Paired sharing step: unit i fires with rho_eps on g and rho_hat_eps on
// g_hat (g with bit jb flipped); every other state copies bit i with
// probability >= 1-eps.
AffineRow pair_step_row(const BitVec& g, const BitVec& g_hat, int i, double rho,
                        double rho_hat, double eps) {
    const int m = static_cast<int>(g.size());
    const double gamma = logit(1.0 - eps);
    const double a = logit_eps(rho, eps);
    const double a_hat = logit_eps(rho_hat, eps);
    int jb = -1;
    for (int k = 0; k < m; ++k)
        if (g[k] != g_hat[k]) jb = k;
    const double sg = g[i] ? -1.0 : 1.0;
    AffineRow row(m);
    row.c = a;
    row.add_indicator(jb, g_hat[jb], a_hat - a);
    row.add_indicator(i, g[i] ? 0 : 1, sg * 2.0 * gamma * (m - 1));
    for (int k = 0; k < m; ++k)
        if (k != i && k != jb) row.add_indicator(k, g[k] ? 0 : 1, -sg * 2.0 * gamma);
    return row;
}

// Preactivation a when the first `face.size()` inputs equal `face`, and
// <= -gamma on every other input (requires a >= -gamma, true after clamping).
AffineRow face_row(int in_width, const BitVec& face, double a, double eps) {
    const double gamma = logit(1.0 - eps);
    AffineRow row(in_width);
    row.c = a;
    for (std::size_t k = 0; k < face.size(); ++k)
        row.add_indicator(static_cast<int>(k), face[k] ? 0 : 1, -2.0 * gamma);
    return row;
}

void put_row(Layer& L, int unit, const AffineRow& row) {
    L.W[unit] = row.w;
    L.b[unit] = row.c;
}

void put_local_row(Layer& L, int offset, int unit, const AffineRow& row) {
    for (std::size_t k = 0; k < row.w.size(); ++k) L.W[offset + unit][offset + k] = row.w[k];
    L.b[offset + unit] = row.c;
}

Layer blank_layer(int out_w, int in_w) {
    Layer L;
    L.W.assign(out_w, std::vector<double>(in_w, 0.0));
    L.b.assign(out_w, 0.0);
    return L;
}

int differing_bit(const BitVec& a, const BitVec& b) {
    int bit = -1;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (a[k] != b[k]) bit = static_cast<int>(k);
    return bit;
}

// Move probabilities of a stick-breaking chain over `masses`: state t keeps
// masses[t] and passes the rest on.
std::vector<double> stick_move_probs(const std::vector<double>& masses) {
    double rem = 0.0;
    for (double m : masses) rem += m;
    std::vector<double> rho;
    rho.reserve(masses.size() - 1);
    for (std::size_t t = 0; t + 1 < masses.size(); ++t) {
        if (!(rem > 0.0))
            throw std::invalid_argument("sharing chain: remaining mass underflow; clamp the target");
        const double next = rem - masses[t];
        if (!(next > 0.0))
            throw std::invalid_argument("sharing chain: remaining mass underflow; clamp the target");
        rho.push_back(next / rem);
        rem = next;
    }
    return rho;
}

int subcube_rank(int s) {
    for (int b = 1; b <= 5; ++b)
        if (s == (1 << (b - 1)) + b) return b;
    return -1;
}

void check_eps(double eps, int s) {
    if (!(eps > 0.0) || !(eps < 1.0 / static_cast<double>(1ULL << s)))
        throw std::invalid_argument("eps must lie in (0, 2^-s)");
}

} // namespace

ArchPlan plan(int d, int s, int j) {
    if (d < 0 || s < 1 || j < 0 || j > d) throw std::invalid_argument("plan: need 0 <= j <= d, s >= 1");
    if (d > 16 || s > 16) throw std::invalid_argument("plan: d or s too large");
    ArchPlan p;
    p.d = d;
    p.s = s;
    p.j = j;
    p.b = subcube_rank(s);
    const int save_one = (j == d) ? 1 : 0;
    p.width = (1 << j) * (s + d - j);
    p.depth_simplified = (1 << (d + s - j)) - save_one;
    if (p.b > 0)
        p.depth_overlaid =
            (1 << (d - j)) * ((1 << (s - p.b)) + (1 << p.b) - 1) - save_one;
    const int depth = p.b > 0 ? p.depth_overlaid : p.depth_simplified;
    p.unit_count = static_cast<long long>(p.width) * depth + s;
    p.trainable_params = (1LL << d) * ((1LL << s) - 1);
    p.full_params = static_cast<long long>(p.width) * (d + 1) +
                    static_cast<long long>(depth - 1) * p.width * (p.width + 1) +
                    static_cast<long long>(s) * (p.width + 1);
    p.shallow_fixed_width = (d == 0 ? 1LL : (1LL << (d - 1))) * ((1LL << s) - 1);
    p.shallow_trainable_width =
        d == 0 ? (1LL << (s - 1)) - 1 : (1LL << d) * (1LL << (s - 1));
    return p;
}

std::pair<std::vector<double>, double> edge_hyperplane(const BitVec& x1, const BitVec& x2) {
    if (x1.size() != x2.size()) throw std::invalid_argument("edge_hyperplane: length mismatch");
    if (hamming(x1, x2) != 1)
        throw std::invalid_argument("edge_hyperplane: states must differ in exactly one bit");
    const int d = static_cast<int>(x1.size());
    const int l = differing_bit(x1, x2);
    std::vector<double> w(d, 0.0);
    double c = 0.0;
    for (int k = 0; k < d; ++k) {
        if (k == l) continue;
        w[k] = 2.0 * (2.0 * x1[k] - 1.0);
        c -= 2.0 * x1[k];
    }
    return {w, c};
}

std::pair<std::vector<std::vector<double>>, std::vector<double>> orthant_map_weights(int s) {
    // weights double per column; s <= 8 keeps every entry finite
    if (s < 1 || s > 8) throw std::invalid_argument("orthant_map_weights: s out of range");
    const std::uint64_t cols = (1ULL << s) - 1;
    std::vector<std::vector<double>> W(s, std::vector<double>(cols, 0.0));
    for (std::uint64_t l = 1; l <= cols; ++l) {
        const BitVec v = bin(l, s);
        const double mag = std::ldexp(1.0, static_cast<int>(l) + 1); // 2^(l+1)
        for (int r = 0; r < s; ++r) W[r][l - 1] = mag * (v[r] - 0.5);
    }
    return {W, std::vector<double>(s, -1.0)};
}

ProductDistribution invert_product_chain(const std::vector<double>& q) {
    const std::size_t K = q.size();
    if (K < 2 || (K & (K - 1)) != 0)
        throw std::invalid_argument("invert_product_chain: length must be a power of two >= 2");
    double sum = 0.0;
    for (double v : q) {
        if (!(v > 0.0)) throw std::invalid_argument("invert_product_chain: entries must be positive");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("invert_product_chain: entries must sum to 1");
    ProductDistribution p;
    p.unit_probs.reserve(K - 1);
    double prefix = q[0];
    for (std::size_t i = 1; i < K; ++i) {
        const double next = prefix + q[i];
        p.unit_probs.push_back(prefix / next);
        prefix = next;
    }
    return p;
}

std::vector<double> invert_sharing_chain(const std::vector<double>& target_row,
                                         const GrayCode& code) {
    if (code.size() < 2) throw std::invalid_argument("invert_sharing_chain: code too short");
    std::vector<double> masses;
    masses.reserve(code.size());
    std::vector<bool> seen(target_row.size(), false);
    for (const auto& st : code) {
        const std::uint64_t idx = dec(st);
        if (idx >= target_row.size())
            throw std::invalid_argument("invert_sharing_chain: code state out of range");
        if (seen[idx]) throw std::invalid_argument("invert_sharing_chain: repeated code state");
        seen[idx] = true;
        masses.push_back(target_row[idx]);
    }
    return stick_move_probs(masses);
}

Layer copy_layer(int m, double eps) {
    if (m < 1) throw std::invalid_argument("copy_layer: m must be positive");
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("copy_layer: eps out of range");
    const double gamma = logit(1.0 - eps);
    Layer L = blank_layer(m, m);
    for (int u = 0; u < m; ++u) {
        L.W[u][u] = 2.0 * gamma;
        L.b[u] = -gamma;
    }
    return L;
}

Layer sharing_layer(int m, const SharingStep& step, double eps) {
    if (m < 2) throw std::invalid_argument("sharing_layer: need m >= 2");
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("sharing_layer: eps out of range");
    if (static_cast<int>(step.g.size()) != m || static_cast<int>(step.g_hat.size()) != m)
        throw std::invalid_argument("sharing_layer: state width mismatch");
    if (step.unit < 1 || step.unit > m) throw std::invalid_argument("sharing_layer: unit out of range");
    if (hamming(step.g, step.g_hat) != 1)
        throw std::invalid_argument("sharing_layer: g and g_hat must be adjacent");
    if (differing_bit(step.g, step.g_hat) == step.unit - 1)
        throw std::invalid_argument("sharing_layer: paired states may not differ in the treated unit");
    if (!(step.rho >= 0.0 && step.rho <= 1.0 && step.rho_hat >= 0.0 && step.rho_hat <= 1.0))
        throw std::invalid_argument("sharing_layer: rho outside [0,1]");
    Layer L = copy_layer(m, eps);
    put_row(L, step.unit - 1,
            pair_step_row(step.g, step.g_hat, step.unit - 1, step.rho, step.rho_hat, eps));
    return L;
}

Layer gate_layer(int d, int s, int j, double eps) {
    if (d < 0 || s < 1 || j < 0 || j > d) throw std::invalid_argument("gate_layer: bad shape");
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("gate_layer: eps out of range");
    const double gamma = logit(1.0 - eps);
    const int secw = s + d - j;
    const int sections = 1 << j;
    Layer L = blank_layer(sections * secw, d);
    for (int tau = 0; tau < sections; ++tau) {
        const int off = tau * secw;
        const BitVec face = bin(static_cast<std::uint64_t>(tau), j);
        put_row(L, off, face_row(d, face, gamma, eps)); // fires exactly on its face
        for (int u = 1; u < s; ++u) L.b[off + u] = -gamma;
        for (int k = 0; k < d - j; ++k) { // pass the ungated input bits through
            L.W[off + s + k][j + k] = 2.0 * gamma;
            L.b[off + s + k] = -gamma;
        }
    }
    return L;
}

Layer or_output_layer(int d, int s, int j, double eps) {
    if (d < 0 || s < 1 || j < 0 || j > d) throw std::invalid_argument("or_output_layer: bad shape");
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("or_output_layer: eps out of range");
    const double gamma = logit(1.0 - eps);
    const int secw = s + d - j;
    const int sections = 1 << j;
    Layer L = blank_layer(s, sections * secw);
    for (int i = 0; i < s; ++i) {
        for (int tau = 0; tau < sections; ++tau) L.W[i][tau * secw + i] = 2.0 * gamma;
        L.b[i] = -gamma;
    }
    return L;
}

namespace {

BitVec concat(const BitVec& a, const BitVec& b) {
    BitVec v = a;
    v.insert(v.end(), b.begin(), b.end());
    return v;
}

// Everything input-specific the deep builder needs for one (section,
// subsection) cell: the move probabilities of its chains.
struct CellChains {
    std::vector<double> rho;                    // simplified: one full-code chain
    std::vector<double> walk_rho;               // overlaid: initial-states walk
    std::vector<std::vector<double>> code_rho;  // overlaid: one chain per code
};

// Copy layer used between the deep builder's sharing steps, at one of three
// strengths chosen to fit the weight budget 2*max{j, s+d-j}*gamma:
//   0: the plain (2g, -g) copy unit (only when the budget caps weights at 2g)
//   1: (3g, -2g): a held 1 still copies with probability exactly 1-eps, but
//      a resting 0 fires spuriously with sigma(-2g) ~ eps^2 instead of eps;
//      with several sections feeding one or-combined output, resting leaks
//      of order eps per section would otherwise dominate the error
//   2: (4g, -2g): ~eps^2 failure in both directions. Used when held values
//      must cross subsection boundaries (j < d), where 2^(d-j) subsections
//      times the chain length would otherwise accumulate eps per layer held.
Layer held_copy_layer(int m, double eps, int strength) {
    if (strength < 1) return copy_layer(m, eps);
    const double gamma = logit(1.0 - eps);
    Layer L = blank_layer(m, m);
    for (int u = 0; u < m; ++u) {
        L.W[u][u] = (strength >= 2 ? 4.0 : 3.0) * gamma;
        L.b[u] = -2.0 * gamma;
    }
    return L;
}

} // namespace

Network build_deep(const Kernel& target, int j, double eps, DeepSchedule schedule) {
    check_kernel(target);
    const int d = target.d, s = target.s;
    if (j < 0 || j > d) throw std::invalid_argument("build_deep: need 0 <= j <= d");
    check_eps(eps, s);

    Kernel K = target;
    for (auto& row : K.rows) clamp_row(row, eps);

    const int secw = s + d - j;
    const int sections = 1 << j;
    const int width = sections * secw;
    const int nsubs = 1 << (d - j);
    const bool save_one = (j == d);
    const int hold = 2 * std::max(j, secw) < 3 ? 0 : (j < d ? 2 : 1);

    // schedule data
    GrayCode code;                   // simplified
    PartialCodeSet pcs;              // overlaid
    std::vector<BitVec> walk;        // overlaid: Gray walk over initial states
    std::vector<int> walk_code;      // code index of each walk state
    int overlay_len = 0;
    if (schedule == DeepSchedule::simplified) {
        code = sharing_code(s);
    } else {
        const int b = subcube_rank(s);
        if (b < 0)
            throw std::invalid_argument(
                "build_deep: no partial code set for this s; use the simplified schedule");
        pcs = partial_codes(s, b);
        overlay_len = 1 << (s - b);
        // varying positions of the initial-state subcube
        std::vector<int> vpos;
        for (int pos = 0; pos < s; ++pos) {
            bool all0 = true, all1 = true;
            for (const auto& c : pcs.codes) (c[0][pos] ? all0 : all1) = false;
            if (!all0 && !all1) vpos.push_back(pos);
        }
        // Gray walk over the subcube from (1,0,...,0)
        BitVec start = bin(1, s);
        std::vector<int> init_of(1ULL << s, -1);
        for (std::size_t c = 0; c < pcs.codes.size(); ++c)
            init_of[dec(pcs.codes[c][0])] = static_cast<int>(c);
        if (init_of[dec(start)] < 0)
            throw std::runtime_error("build_deep: (1,0,...,0) is not an initial state");
        for (std::uint64_t t = 0; t < (1ULL << b); ++t) {
            const std::uint64_t gr = t ^ (t >> 1);
            BitVec st = start;
            for (int k = 0; k < b; ++k)
                if ((gr >> k) & 1) st[vpos[k]] ^= 1;
            const int ci = init_of[dec(st)];
            if (ci < 0) throw std::runtime_error("build_deep: walk left the initial subcube");
            walk.push_back(std::move(st));
            walk_code.push_back(ci);
        }
    }

    // per-cell chains; cell (tau, q) serves input (bin(tau,j) | bin(q,d-j))
    std::vector<std::vector<CellChains>> cells(sections, std::vector<CellChains>(nsubs));
    for (int tau = 0; tau < sections; ++tau)
        for (int q = 0; q < nsubs; ++q) {
            const BitVec x = concat(bin(tau, j), bin(q, d - j));
            const auto& row = K.rows[dec(x)];
            CellChains& cc = cells[tau][q];
            if (schedule == DeepSchedule::simplified) {
                cc.rho = invert_sharing_chain(row, code);
            } else {
                std::vector<double> walk_masses;
                for (int w = 0; w < static_cast<int>(walk.size()); ++w) {
                    const auto& c = pcs.codes[walk_code[w]];
                    double M = 0.0;
                    for (const auto& st : c) M += row[dec(st)];
                    walk_masses.push_back(M);
                }
                cc.walk_rho = stick_move_probs(walk_masses);
                cc.code_rho.resize(pcs.codes.size());
                for (std::size_t c = 0; c < pcs.codes.size(); ++c) {
                    std::vector<double> masses;
                    for (const auto& st : pcs.codes[c]) masses.push_back(row[dec(st)]);
                    cc.code_rho[c] = stick_move_probs(masses);
                }
            }
        }

    // firing probability of the treated unit when the chain moves cur -> nxt
    auto fire_prob = [](const BitVec& nxt, int bit, double rho_move) {
        return nxt[bit] ? rho_move : 1.0 - rho_move;
    };

    Network net;
    net.d = d;

    // layer 1: gates, pass-through of ungated inputs, and (j = d) the first
    // chain move folded into the gate
    {
        Layer L1 = gate_layer(d, s, j, eps);
        if (save_one) {
            for (int tau = 0; tau < sections; ++tau) {
                const BitVec face = bin(tau, j);
                const CellChains& cc = cells[tau][0];
                int bit;
                double pr;
                if (schedule == DeepSchedule::simplified) {
                    bit = differing_bit(code[0], code[1]);
                    pr = fire_prob(code[1], bit, cc.rho[0]);
                } else {
                    bit = differing_bit(walk[0], walk[1]);
                    pr = fire_prob(walk[1], bit, cc.walk_rho[0]);
                }
                put_row(L1, tau * secw + bit, face_row(d, face, logit_eps(pr, eps), eps));
            }
        }
        net.layers.push_back(std::move(L1));
    }

    // one sharing layer: every section applies the same step position within
    // its own unit block; rows not receiving a step copy themselves
    auto push_step_layer =
        [&](const std::function<void(int tau, int q, Layer& L, int off)>& fill, int q) {
            Layer L = held_copy_layer(width, eps, hold);
            for (int tau = 0; tau < sections; ++tau) fill(tau, q, L, tau * secw);
            net.layers.push_back(std::move(L));
        };

    for (int q = 0; q < nsubs; ++q) {
        if (q > 0) // subsection entry
            net.layers.push_back(held_copy_layer(width, eps, hold));
        const BitVec suffix = bin(q, d - j);
        if (schedule == DeepSchedule::simplified) {
            const int t0 = (save_one && q == 0) ? 1 : 0;
            for (std::size_t t = t0; t + 1 < code.size(); ++t)
                push_step_layer(
                    [&](int tau, int qq, Layer& L, int off) {
                        const CellChains& cc = cells[tau][qq];
                        const int bit = differing_bit(code[t], code[t + 1]);
                        const double pr = fire_prob(code[t + 1], bit, cc.rho[t]);
                        put_local_row(L, off, bit,
                                      single_step_row(concat(code[t], suffix), bit, pr, eps));
                    },
                    q);
        } else {
            const int w0 = (save_one && q == 0) ? 1 : 0;
            for (std::size_t w = w0; w + 1 < walk.size(); ++w)
                push_step_layer(
                    [&](int tau, int qq, Layer& L, int off) {
                        const CellChains& cc = cells[tau][qq];
                        const int bit = differing_bit(walk[w], walk[w + 1]);
                        const double pr = fire_prob(walk[w + 1], bit, cc.walk_rho[w]);
                        put_local_row(L, off, bit,
                                      single_step_row(concat(walk[w], suffix), bit, pr, eps));
                    },
                    q);
            for (int k = 0; k + 1 < overlay_len; ++k)
                push_step_layer(
                    [&](int tau, int qq, Layer& L, int off) {
                        const CellChains& cc = cells[tau][qq];
                        // group codes by the bit they switch at step k
                        std::vector<int> by_bit(s, -1);
                        for (std::size_t c = 0; c < pcs.codes.size(); ++c) {
                            const auto& sc = pcs.codes[c];
                            const int bit = differing_bit(sc[k], sc[k + 1]);
                            const double pr = fire_prob(sc[k + 1], bit, cc.code_rho[c][k]);
                            if (by_bit[bit] < 0) {
                                by_bit[bit] = static_cast<int>(c);
                                put_local_row(
                                    L, off, bit,
                                    single_step_row(concat(sc[k], suffix), bit, pr, eps));
                            } else {
                                // second code switching this bit: adjacent states,
                                // merge into one paired row
                                const auto& sc0 = pcs.codes[by_bit[bit]][k];
                                if (hamming(sc0, sc[k]) != 1)
                                    throw std::runtime_error(
                                        "build_deep: clashing non-adjacent steps");
                                const double pr0 = fire_prob(pcs.codes[by_bit[bit]][k + 1], bit,
                                                             cc.code_rho[by_bit[bit]][k]);
                                put_local_row(L, off, bit,
                                              pair_step_row(concat(sc0, suffix),
                                                            concat(sc[k], suffix), bit, pr0, pr,
                                                            eps));
                            }
                        }
                    },
                    q);
        }
    }

    net.layers.push_back(or_output_layer(d, s, j, eps));
    check_network(net);
    return net;
}

Network build_shallow_fixed(const Kernel& target, double eps, double scale) {
    check_kernel(target);
    const int d = target.d, s = target.s;
    check_eps(eps, s);
    if (!(scale > 0.0)) throw std::invalid_argument("build_shallow_fixed: scale must be positive");

    Kernel K = target;
    for (auto& row : K.rows) clamp_row(row, eps);

    const int nb = (1 << s) - 1;           // units per block
    const int blocks = d == 0 ? 1 : 1 << (d - 1);
    const int width = blocks * nb;
    auto [WQ, bQ] = orthant_map_weights(s);

    Network net;
    net.d = d;
    Layer L1 = blank_layer(width, d);
    for (int blk = 0; blk < blocks; ++blk) {
        const int off = blk * nb;
        if (d == 0) {
            const ProductDistribution p = invert_product_chain(K.rows[0]);
            for (int u = 0; u < nb; ++u) L1.b[u] = logit(p.unit_probs[u]);
        } else {
            // the block handles the input pair differing in bit 1
            const BitVec x1 = bin(2ULL * blk, d), x2 = bin(2ULL * blk + 1, d);
            const ProductDistribution p1 = invert_product_chain(K.rows[dec(x1)]);
            const ProductDistribution p2 = invert_product_chain(K.rows[dec(x2)]);
            auto [we, ce] = edge_hyperplane(x1, x2);
            for (int u = 0; u < nb; ++u) {
                const double g1 = logit(p1.unit_probs[u]);
                const double g2 = logit(p2.unit_probs[u]);
                // on the pair the unit fires with its chain probability; off
                // the pair the negated hyperplane drives it to 1
                for (int k = 0; k < d; ++k) L1.W[off + u][k] = -scale * we[k];
                L1.W[off + u][0] += g2 - g1;
                L1.b[off + u] = -scale * ce + g1;
            }
        }
    }
    net.layers.push_back(std::move(L1));

    // complemented orthant decode: idle blocks sit at all-ones and cancel
    Layer L2 = blank_layer(s, width);
    for (int r = 0; r < s; ++r) {
        double rowsum = 0.0;
        for (int u = 0; u < nb; ++u) rowsum += WQ[r][u];
        for (int blk = 0; blk < blocks; ++blk)
            for (int u = 0; u < nb; ++u) L2.W[r][blk * nb + u] = -scale * WQ[r][u];
        L2.b[r] = scale * (blocks * rowsum + bQ[r]);
    }
    net.layers.push_back(std::move(L2));
    check_network(net);
    return net;
}

namespace {

// Solve ratio(mu) = target for a strictly decreasing ratio, mu in [-50,50].
double bisect_ratio(const std::function<double(double)>& ratio, double target) {
    double lo = -50.0, hi = 50.0;
    if (!(ratio(lo) >= target && target >= ratio(hi)))
        throw std::runtime_error("tuning: target ratio is not bracketed");
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) >= target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

Network build_shallow_trainable(const Kernel& target, double eps, double scale,
                                TrainableVariant variant) {
    check_kernel(target);
    const int d = target.d, s = target.s;
    check_eps(eps, s);
    if (s < 2) throw std::invalid_argument("build_shallow_trainable: need s >= 2");
    if (!(scale > 0.0))
        throw std::invalid_argument("build_shallow_trainable: scale must be positive");

    Kernel K = target;
    for (auto& row : K.rows) clamp_row(row, eps);

    const int nchain = (1 << (s - 1)) - 1; // chain units per block
    const bool anchored = variant == TrainableVariant::anchored && d >= 1;
    const int per_block = anchored ? nchain + 1 : nchain; // anchor sits first
    const int blocks = d == 0 ? 1 : 1 << d;
    const int width = blocks * per_block;
    auto [WP, bP] = orthant_map_weights(s - 1);

    // chain firing probabilities per block: class {z: largest set index = l}
    // carries the target's column-pair mass q_{2l}+q_{2l+1}
    std::vector<std::vector<double>> fire(blocks);
    for (int blk = 0; blk < blocks; ++blk) {
        std::vector<double> pairsum(1ULL << (s - 1));
        for (std::size_t l = 0; l < pairsum.size(); ++l)
            pairsum[l] = K.rows[blk][2 * l] + K.rows[blk][2 * l + 1];
        const ProductDistribution p = invert_product_chain(pairsum);
        fire[blk].resize(nchain);
        for (int u = 0; u < nchain; ++u) fire[blk][u] = 1.0 - p.unit_probs[u];
    }

    Network net;
    net.d = d;
    Layer L1 = blank_layer(width, d);
    for (int blk = 0; blk < blocks; ++blk) {
        const int off = blk * per_block;
        const BitVec x = bin(static_cast<std::uint64_t>(blk), d);
        if (anchored) {
            // anchor: ~1 exactly on input x, ~0 elsewhere
            for (int k = 0; k < d; ++k) L1.W[off][k] = 2.0 * scale * (2.0 * x[k] - 1.0);
            double ones = 0;
            for (int k = 0; k < d; ++k) ones += x[k];
            L1.b[off] = scale - 2.0 * scale * ones;
        }
        const int coff = off + (anchored ? 1 : 0);
        for (int u = 0; u < nchain; ++u) {
            L1.b[coff + u] = logit(fire[blk][u]);
            if (d >= 1) {
                // gate the chain unit onto its input
                double ones = 0;
                for (int k = 0; k < d; ++k) {
                    L1.W[coff + u][k] = 2.0 * scale * (2.0 * x[k] - 1.0);
                    ones += x[k];
                }
                L1.b[coff + u] -= 2.0 * scale * ones;
            }
        }
    }
    net.layers.push_back(std::move(L1));

    Layer L2 = blank_layer(s, width);
    for (int r = 1; r < s; ++r) {
        for (int blk = 0; blk < blocks; ++blk) {
            const int coff = blk * per_block + (anchored ? 1 : 0);
            for (int u = 0; u < nchain; ++u) L2.W[r][coff + u] = scale * WP[r - 1][u];
        }
        L2.b[r] = scale * bP[r - 1];
    }

    // unit 1 carries the trainable output row, tuned one column pair at a
    // time: within class l the odds of emitting the low bit 0 vs 1 must match
    // q_{2l} : q_{2l+1}
    std::vector<std::vector<std::uint64_t>> classes(nchain + 1);
    for (std::uint64_t z = 0; z < (1ULL << nchain); ++z)
        classes[largest_set_index(bin(z, nchain))].push_back(z);

    auto tune_block = [&](int blk, double mu0, bool tune_mu0) {
        const auto& f = fire[blk];
        std::vector<double> mu(nchain, 0.0);
        double base = mu0;
        // odds of y_1 = 0 vs 1 within class l; `cand` stands in for the
        // parameter currently being solved (mu0 when l = 0, else mu_l)
        auto ratio_for = [&](int l, double cand) {
            double num = 0.0, den = 0.0;
            for (std::uint64_t z : classes[l]) {
                double pz = 1.0, pre = l == 0 ? cand : base;
                for (int k = 0; k < nchain; ++k) {
                    const bool on = (z >> k) & 1;
                    pz *= on ? f[k] : 1.0 - f[k];
                    if (on) pre += k == l - 1 ? cand : mu[k];
                }
                num += pz * sigmoid(-pre);
                den += pz * sigmoid(pre);
            }
            return num / den;
        };
        if (tune_mu0)
            base = bisect_ratio([&](double c) { return ratio_for(0, c); },
                                K.rows[blk][0] / K.rows[blk][1]);
        for (int l = 1; l <= nchain; ++l) {
            const double r = K.rows[blk][2 * l] / K.rows[blk][2 * l + 1];
            mu[l - 1] = bisect_ratio([&](double c) { return ratio_for(l, c); }, r);
        }
        return std::make_pair(base, mu);
    };

    if (anchored) {
        for (int blk = 0; blk < blocks; ++blk) {
            auto [mu0, mu] = tune_block(blk, 0.0, true);
            const int off = blk * per_block;
            L2.W[0][off] = mu0;
            for (int u = 0; u < nchain; ++u) L2.W[0][off + 1 + u] = mu[u];
        }
        L2.b[0] = 0.0;
    } else {
        // shared output bias, tuned on the first input's empty class
        auto [mu0_first, mu_first] = tune_block(0, 0.0, true);
        L2.b[0] = mu0_first;
        for (int u = 0; u < nchain; ++u) L2.W[0][u] = mu_first[u];
        for (int blk = 1; blk < blocks; ++blk) {
            auto [mu0, mu] = tune_block(blk, mu0_first, false);
            (void)mu0;
            for (int u = 0; u < nchain; ++u) L2.W[0][blk * per_block + u] = mu[u];
        }
    }
    net.layers.push_back(std::move(L2));
    check_network(net);
    return net;
}

double error_bound(double eps, long long N) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("error_bound: eps out of range");
    if (N < 0) throw std::invalid_argument("error_bound: negative N");
    return 1.0 - std::pow(1.0 - eps, static_cast<double>(N)) + 2.0 * eps;
}

double alpha_for_eps(double eps, int m) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("alpha_for_eps: eps out of range");
    if (m < 1) throw std::invalid_argument("alpha_for_eps: m must be positive");
    return 2.0 * m * logit(1.0 - eps);
}

ValidationReport validate_arch(int d, int s, const std::vector<int>& hidden_widths,
                               long long param_count) {
    if (d < 0 || s < 1) throw std::invalid_argument("validate_arch: bad d or s");
    ValidationReport rep;
    auto rule = [&](const std::string& id, bool flagged, const std::string& detail) {
        rep.rules.push_back({id, flagged, flagged ? detail : ""});
        if (flagged) rep.ok = false;
    };

    const long long need = (1LL << d) * ((1LL << s) - 1);
    rule("parameter_budget", param_count >= 0 && param_count < need,
         "fewer than " + std::to_string(need) + " parameters for 2^" + std::to_string(d) +
             " target rows of 2^" + std::to_string(s) + " entries");

    const int floor_w = std::min(d, s);
    int narrow = -1;
    for (std::size_t i = 0; i < hidden_widths.size(); ++i)
        if (hidden_widths[i] < floor_w && narrow < 0) narrow = static_cast<int>(i);
    rule("min_width", narrow >= 0,
         narrow < 0 ? "" : "hidden layer " + std::to_string(narrow + 1) + " narrower than min(d,s) = " +
                               std::to_string(floor_w));

    const int last_need = (d >= 1 || s % 2 == 1) ? s : s - 1;
    const bool last_bad = !hidden_widths.empty() && hidden_widths.back() < last_need;
    rule("last_width", last_bad,
         "last hidden layer narrower than " + std::to_string(last_need) +
             "; the output cannot hold a full-support distribution over 2^" + std::to_string(s) +
             " states");
    return rep;
}

} // namespace sbn
