#include "sbn/net.hpp"

#include <cmath>
#include <stdexcept>

#include "sbn/rng.hpp"

namespace sbn {

double sigmoid(double t) {
    // evaluate on the negative side only, for symmetric rounding
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double logit(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("logit: need 0 < p < 1");
    return std::log(p) - std::log1p(-p);
}

long long Network::total_units() const {
    long long n = 0;
    for (const auto& l : layers) n += l.out_width();
    return n;
}

long long Network::hidden_units() const {
    return layers.empty() ? 0 : total_units() - layers.back().out_width();
}

void check_network(const Network& net) {
    if (net.d < 0) throw std::invalid_argument("network: negative input width");
    if (net.layers.empty()) throw std::invalid_argument("network: no layers");
    int prev = net.d;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& L = net.layers[l];
        if (L.W.size() != L.b.size())
            throw std::invalid_argument("network: W/b row mismatch in layer " + std::to_string(l + 1));
        for (const auto& row : L.W)
            if (static_cast<int>(row.size()) != prev)
                throw std::invalid_argument("network: bad fan-in in layer " + std::to_string(l + 1));
        if (L.out_width() == 0)
            throw std::invalid_argument("network: empty layer " + std::to_string(l + 1));
        prev = L.out_width();
    }
}

void check_kernel(const Kernel& k) {
    if (k.d < 0 || k.s < 0 || k.d > 20 || k.s > 20)
        throw std::invalid_argument("kernel: d or s out of range");
    if (k.rows.size() != (1ULL << k.d)) throw std::invalid_argument("kernel: wrong row count");
    for (const auto& r : k.rows)
        if (r.size() != (1ULL << k.s)) throw std::invalid_argument("kernel: wrong row length");
}

std::vector<double> product_expand(const ProductDistribution& p) {
    const int n = static_cast<int>(p.unit_probs.size());
    if (n > 24) throw std::invalid_argument("product_expand: too many units");
    for (double q : p.unit_probs)
        if (!(q >= 0.0 && q <= 1.0))
            throw std::invalid_argument("product_expand: probability outside [0,1]");
    std::vector<double> out(1ULL << n, 1.0);
    for (std::uint64_t z = 0; z < out.size(); ++z)
        for (int i = 0; i < n; ++i)
            out[z] *= ((z >> i) & 1) ? p.unit_probs[i] : 1.0 - p.unit_probs[i];
    return out;
}

Kernel layer_kernel(const Layer& layer) {
    const int din = layer.in_width();
    const int dout = layer.out_width();
    if (din > 20 || dout > 20) throw std::invalid_argument("layer_kernel: width over 20");
    Kernel k;
    k.d = din;
    k.s = dout;
    const std::uint64_t nin = 1ULL << din, nout = 1ULL << dout;
    k.rows.assign(nin, std::vector<double>(nout, 1.0));
    std::vector<double> fire(dout);
    for (std::uint64_t x = 0; x < nin; ++x) {
        for (int u = 0; u < dout; ++u) {
            double pre = layer.b[u];
            for (int i = 0; i < din; ++i)
                if ((x >> i) & 1) pre += layer.W[u][i];
            fire[u] = sigmoid(pre);
        }
        auto& row = k.rows[x];
        for (std::uint64_t y = 0; y < nout; ++y) {
            double p = 1.0;
            for (int u = 0; u < dout; ++u) p *= ((y >> u) & 1) ? fire[u] : 1.0 - fire[u];
            row[y] = p;
        }
    }
    return k;
}

Kernel compose(const Kernel& a, const Kernel& b) {
    if (a.s != b.d) throw std::invalid_argument("compose: inner dimensions differ");
    Kernel out;
    out.d = a.d;
    out.s = b.s;
    const std::uint64_t nr = 1ULL << a.d, ni = 1ULL << a.s, nc = 1ULL << b.s;
    out.rows.assign(nr, std::vector<double>(nc, 0.0));
    for (std::uint64_t r = 0; r < nr; ++r)
        for (std::uint64_t m = 0; m < ni; ++m) {
            const double w = a.rows[r][m];
            if (w == 0.0) continue;
            const auto& brow = b.rows[m];
            auto& orow = out.rows[r];
            for (std::uint64_t c = 0; c < nc; ++c) orow[c] += w * brow[c];
        }
    return out;
}

Kernel network_kernel(const Network& net) {
    check_network(net);
    Kernel k = layer_kernel(net.layers[0]);
    k.d = net.d;
    for (std::size_t l = 1; l < net.layers.size(); ++l)
        k = compose(k, layer_kernel(net.layers[l]));
    return k;
}

namespace {

// recursive sum over all hidden tuples; prefix carries the probability of
// the states fixed so far
void brute_rec(const Network& net, std::size_t l, const BitVec& state, double prefix,
               std::vector<double>& row) {
    const Layer& L = net.layers[l];
    const int w = L.out_width();
    std::vector<double> fire(w);
    for (int u = 0; u < w; ++u) {
        double pre = L.b[u];
        for (std::size_t i = 0; i < state.size(); ++i)
            if (state[i]) pre += L.W[u][i];
        fire[u] = sigmoid(pre);
    }
    const bool last = (l + 1 == net.layers.size());
    const std::uint64_t n = 1ULL << w;
    BitVec next(w);
    for (std::uint64_t y = 0; y < n; ++y) {
        double p = prefix;
        for (int u = 0; u < w; ++u) {
            const bool on = (y >> u) & 1;
            next[u] = on;
            p *= on ? fire[u] : 1.0 - fire[u];
        }
        if (last)
            row[y] += p;
        else if (p > 0.0)
            brute_rec(net, l + 1, next, p, row);
    }
}

} // namespace

Kernel network_kernel_bruteforce(const Network& net) {
    check_network(net);
    if (net.hidden_units() > 24)
        throw std::invalid_argument("network_kernel_bruteforce: more than 24 hidden units");
    Kernel k;
    k.d = net.d;
    k.s = net.out_width();
    k.rows.assign(1ULL << net.d, std::vector<double>(1ULL << k.s, 0.0));
    for (std::uint64_t x = 0; x < k.rows.size(); ++x) {
        BitVec xb = bin(x, net.d);
        brute_rec(net, 0, xb, 1.0, k.rows[x]);
    }
    return k;
}

std::vector<std::uint64_t> sample(const Network& net, const BitVec& x, long long n,
                                  std::uint64_t seed) {
    check_network(net);
    if (static_cast<int>(x.size()) != net.d) throw std::invalid_argument("sample: input width");
    if (n < 0) throw std::invalid_argument("sample: negative sample count");
    std::vector<std::uint64_t> counts(1ULL << net.out_width(), 0);
    BitVec state, next;
    for (long long t = 0; t < n; ++t) {
        state = x;
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            const Layer& L = net.layers[l];
            const int w = L.out_width();
            next.assign(w, 0);
            for (int u = 0; u < w; ++u) {
                double pre = L.b[u];
                for (std::size_t i = 0; i < state.size(); ++i)
                    if (state[i]) pre += L.W[u][i];
                const double r = uniform01(hash_key(seed, static_cast<std::uint64_t>(t),
                                                    static_cast<std::uint64_t>(l + 1),
                                                    static_cast<std::uint64_t>(u + 1)));
                next[u] = r < sigmoid(pre) ? 1 : 0;
            }
            state.swap(next);
        }
        ++counts[dec(state)];
    }
    return counts;
}

double mutual_information(const std::vector<std::vector<double>>& joint) {
    if (joint.empty() || joint[0].empty())
        throw std::invalid_argument("mutual_information: empty joint");
    const std::size_t nr = joint.size(), nc = joint[0].size();
    double total = 0.0;
    for (const auto& row : joint) {
        if (row.size() != nc) throw std::invalid_argument("mutual_information: ragged rows");
        for (double v : row) {
            if (v < 0.0) throw std::invalid_argument("mutual_information: negative entry");
            total += v;
        }
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("mutual_information: entries must sum to 1");
    std::vector<double> px(nr, 0.0), py(nc, 0.0);
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < nc; ++c) {
            px[r] += joint[r][c];
            py[c] += joint[r][c];
        }
    double mi = 0.0;
    for (std::size_t r = 0; r < nr; ++r)
        for (std::size_t c = 0; c < nc; ++c) {
            const double p = joint[r][c];
            if (p > 0.0) mi += p * std::log2(p / (px[r] * py[c]));
        }
    return mi;
}

void clamp_row(std::vector<double>& row, double eps) {
    const std::size_t K = row.size();
    if (!(eps > 0.0) || eps * static_cast<double>(K) >= 1.0)
        throw std::invalid_argument("clamp_row: need 0 < eps < 1/K");
    double added = 0.0, surplus = 0.0;
    for (double v : row)
        if (v < eps)
            added += eps - v;
        else
            surplus += v - eps;
    if (added == 0.0) return;
    if (surplus < added) throw std::invalid_argument("clamp_row: row mass below eps*K");
    const double shrink = 1.0 - added / surplus;
    for (double& v : row) v = (v < eps) ? eps : eps + (v - eps) * shrink;
}

} // namespace sbn
