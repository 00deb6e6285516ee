#include "sbn/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sbn/rng.hpp"

namespace sbn {

double max_abs_error(const Kernel& a, const Kernel& b) {
    if (a.d != b.d || a.s != b.s) throw std::invalid_argument("max_abs_error: shape mismatch");
    check_kernel(a);
    check_kernel(b);
    double m = 0.0;
    for (std::size_t r = 0; r < a.rows.size(); ++r)
        for (std::size_t c = 0; c < a.rows[r].size(); ++c)
            m = std::max(m, std::abs(a.rows[r][c] - b.rows[r][c]));
    return m;
}

Kernel clamp_to_eps(const Kernel& k, double eps) {
    check_kernel(k);
    for (const auto& row : k.rows) {
        double sum = 0.0;
        for (double v : row) {
            if (v < 0.0) throw std::invalid_argument("clamp_to_eps: negative entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("clamp_to_eps: rows must sum to 1");
    }
    Kernel out = k;
    for (auto& row : out.rows) clamp_row(row, eps);
    return out;
}

Kernel random_kernel(int d, int s, std::uint64_t seed, std::uint64_t trial) {
    if (d < 0 || s < 1 || d > 16 || s > 16)
        throw std::invalid_argument("random_kernel: bad shape");
    Kernel k;
    k.d = d;
    k.s = s;
    k.rows.assign(1ULL << d, std::vector<double>(1ULL << s, 0.0));
    for (std::uint64_t r = 0; r < k.rows.size(); ++r) {
        double sum = 0.0;
        for (std::uint64_t c = 0; c < k.rows[r].size(); ++c) {
            // unit-rate exponentials normalize to a flat Dirichlet row
            const double u = uniform01(hash_key(seed, trial, r, c));
            k.rows[r][c] = -std::log(u);
            sum += k.rows[r][c];
        }
        for (auto& v : k.rows[r]) v /= sum;
    }
    return k;
}

std::vector<double> table8_default_eps() {
    return {0.025, 0.0125, 0.00625, 0.003125, 0.0015625};
}

std::vector<ExperimentRow> table8(int trials, const std::vector<double>& eps_list,
                                  std::uint64_t seed, const std::string& mode,
                                  long long samples_per_input) {
    if (trials < 1) throw std::invalid_argument("table8: need at least one trial");
    if (eps_list.empty()) throw std::invalid_argument("table8: empty eps list");
    const bool sampled = mode == "sampled";
    if (!sampled && mode != "exact") throw std::invalid_argument("table8: mode must be exact or sampled");
    if (sampled && samples_per_input < 1)
        throw std::invalid_argument("table8: need samples_per_input >= 1 in sampled mode");

    const int d = 2, s = 2, j = 2;
    std::vector<ExperimentRow> rows;
    for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
        const double eps = eps_list[ei];
        ExperimentRow out;
        out.eps = eps;
        out.mode = sampled ? "sampled" : "exact";
        out.trials = trials;
        out.samples_per_input = sampled ? samples_per_input : 0;
        double sum_err = 0.0, max_err = 0.0;
        long long N = 0;
        for (int t = 0; t < trials; ++t) {
            const Kernel target = random_kernel(d, s, seed, static_cast<std::uint64_t>(t));
            const Kernel clamped = clamp_to_eps(target, eps);
            const Network net = build_deep(clamped, j, eps, DeepSchedule::overlaid);
            N = net.total_units();
            double err;
            if (!sampled) {
                err = max_abs_error(network_kernel(net), clamped);
            } else {
                err = 0.0;
                for (std::uint64_t x = 0; x < (1ULL << d); ++x) {
                    const std::uint64_t sub =
                        hash_key(seed, 0x7ab8ULL + ei, static_cast<std::uint64_t>(t), x);
                    const auto counts = sample(net, bin(x, d), samples_per_input, sub);
                    for (std::size_t y = 0; y < counts.size(); ++y) {
                        const double freq = static_cast<double>(counts[y]) /
                                            static_cast<double>(samples_per_input);
                        err = std::max(err, std::abs(freq - clamped.rows[x][y]));
                    }
                }
            }
            sum_err += err;
            max_err = std::max(max_err, err);
        }
        out.alpha = alpha_for_eps(eps, s + d - j > j ? s + d - j : j);
        out.bound = error_bound(eps, N);
        out.e_avg = sum_err / trials;
        out.e_max = max_err;
        rows.push_back(out);
    }
    return rows;
}

std::string format_experiment_table(const std::vector<ExperimentRow>& rows) {
    char buf[160];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-12s %-10s %-10s %-10s %-10s\n", "10*eps", "alpha",
                  "bound", "E_avg", "E_max");
    out += buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-12.6g %-10.4f %-10.4f %-10.4f %-10.4f\n", 10.0 * r.eps,
                      r.alpha, r.bound, r.e_avg, r.e_max);
        out += buf;
    }
    return out;
}

std::vector<double> convergence_sweep(const Kernel& target, const ArchChoice& arch,
                                      const std::vector<double>& eps_list) {
    check_kernel(target);
    std::vector<double> errs;
    errs.reserve(eps_list.size());
    for (double eps : eps_list) {
        const Kernel clamped = clamp_to_eps(target, eps);
        Network net;
        switch (arch.kind) {
        case ArchChoice::Kind::shallow_fixed:
            net = build_shallow_fixed(clamped, eps, arch.scale);
            break;
        case ArchChoice::Kind::shallow_trainable:
            net = build_shallow_trainable(clamped, eps, arch.scale, arch.variant);
            break;
        case ArchChoice::Kind::deep:
            net = build_deep(clamped, arch.j, eps, arch.schedule);
            break;
        }
        errs.push_back(max_abs_error(network_kernel(net), clamped));
    }
    return errs;
}

} // namespace sbn
