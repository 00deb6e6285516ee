// Command line front end. Bit strings on the command line and in printed
// state lists are written first-bit-first: "10" means bit 1 = 1, bit 2 = 0,
// i.e. the state with decimal index 1.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbn/bits.hpp"
#include "sbn/construct.hpp"
#include "sbn/experiment.hpp"
#include "sbn/jsonio.hpp"
#include "sbn/net.hpp"

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SBN_SEED")) {
        try {
            return std::stoull(env);
        } catch (...) {
            throw std::runtime_error("SBN_SEED is not a valid unsigned integer");
        }
    }
    return 0;
}

sbn::BitVec parse_bits(const std::string& s) {
    sbn::BitVec v;
    v.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw std::runtime_error("bit strings may only contain 0 and 1");
        v.push_back(c == '1');
    }
    return v;
}

void emit(const sbn::json& j, const std::string& out_path) {
    if (out_path.empty())
        std::cout << sbn::dump_json17(j);
    else
        sbn::save_json_file(out_path, j);
}

int rank_for(int s) {
    for (int b = 1; b <= 5; ++b)
        if (s == (1 << (b - 1)) + b) return b;
    return -1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Constructs sigmoid stochastic feedforward networks realizing binary Markov kernels,\n"
        "evaluates their exact kernels, and checks them against the 1-(1-eps)^N + 2*eps bound.\n"
        "Bit strings are first-bit-first; kernel rows/columns are ordered by their decimal value."};
    app.require_subcommand(1);

    // plan
    int p_d = 0, p_s = 1, p_j = 0;
    auto* c_plan = app.add_subcommand("plan", "architecture report for the deep construction");
    c_plan->add_option("--d", p_d, "input bits")->required();
    c_plan->add_option("--s", p_s, "output bits")->required();
    c_plan->add_option("--j", p_j, "gated input bits (2^j parallel sections)")->required();

    // construct
    std::string b_target, b_arch, b_variant = "default", b_schedule = "simplified", b_out;
    double b_eps = 0.0, b_scale = 30.0;
    int b_j = -1;
    auto* c_build = app.add_subcommand("construct", "build a network for a target kernel");
    c_build->add_option("--target", b_target, "target kernel JSON file")->required();
    c_build->add_option("--arch", b_arch, "deep | shallow-fixed | shallow-trainable")->required();
    c_build->add_option("--eps", b_eps, "per-unit failure probability, in (0, 2^-s)")->required();
    c_build->add_option("--j", b_j, "deep: gated input bits (default d)");
    c_build->add_option("--scale", b_scale, "shallow: saturation weight (default 30)");
    c_build->add_option("--variant", b_variant, "shallow-trainable: literal | anchored (default: anchored when d >= 1)");
    c_build->add_option("--schedule", b_schedule, "deep: simplified | overlaid (default simplified)");
    c_build->add_option("--out", b_out, "output network JSON file")->required();

    // eval
    std::string e_net, e_out;
    auto* c_eval = app.add_subcommand("eval", "exact kernel of a network");
    c_eval->add_option("--network", e_net, "network JSON file")->required();
    c_eval->add_option("--out", e_out, "output kernel JSON file (default stdout)");

    // sample
    std::string s_net, s_input, s_out;
    long long s_n = 0;
    std::uint64_t s_seed = 0;
    bool s_seed_set = false;
    auto* c_sample = app.add_subcommand("sample", "ancestral samples, counted per output state");
    c_sample->add_option("--network", s_net, "network JSON file")->required();
    c_sample->add_option("--input", s_input, "input bits, first-bit-first (e.g. 10)")->required();
    c_sample->add_option("--n", s_n, "number of samples")->required();
    c_sample->add_option("--seed", s_seed, "RNG seed (default $SBN_SEED or 0)")
        ->each([&](const std::string&) { s_seed_set = true; });

    // verify
    std::string v_net, v_target;
    double v_eps = 0.0;
    auto* c_verify = app.add_subcommand(
        "verify", "exact error of a network against a target kernel projected into [eps,1-eps]");
    c_verify->add_option("--network", v_net, "network JSON file")->required();
    c_verify->add_option("--target", v_target, "target kernel JSON file")->required();
    c_verify->add_option("--eps", v_eps, "eps the network was built for")->required();

    // table8
    int t_trials = 500;
    std::uint64_t t_seed = 0;
    bool t_seed_set = false;
    std::string t_mode = "exact", t_out;
    long long t_samples = 25000;
    std::vector<double> t_eps;
    auto* c_table = app.add_subcommand(
        "table8", "error-vs-eps reference experiment: random 4x4 targets, deep net with j=2");
    c_table->add_option("--trials", t_trials, "targets per eps (default 500)");
    c_table->add_option("--seed", t_seed, "RNG seed (default $SBN_SEED or 0)")
        ->each([&](const std::string&) { t_seed_set = true; });
    c_table->add_option("--mode", t_mode, "exact | sampled");
    c_table->add_option("--samples", t_samples, "sampled mode: samples per input (default 25000)");
    c_table->add_option("--eps", t_eps, "eps values (default 0.025 halving to 0.0015625)");
    c_table->add_option("--out", t_out, "write rows as JSON to this file");

    // graycode
    int g_s = 1, g_b = -1;
    bool g_partial = false;
    auto* c_gray = app.add_subcommand("graycode", "sharing walk over {0,1}^s, or partial codes");
    c_gray->add_option("--s", g_s, "state bits")->required();
    c_gray->add_flag("--partial", g_partial, "emit the 2^b-code partition instead");
    c_gray->add_option("--b", g_b, "subcube rank for --partial (default: inferred)");

    // validate-arch
    int va_d = 0, va_s = 1;
    long long va_params = -1;
    std::vector<int> va_widths;
    auto* c_va = app.add_subcommand("validate-arch", "capacity screens for an architecture");
    c_va->add_option("--d", va_d, "input bits")->required();
    c_va->add_option("--s", va_s, "output bits")->required();
    c_va->add_option("--widths", va_widths, "hidden layer widths")->required()->delimiter(',');
    c_va->add_option("--params", va_params, "trainable parameter budget (default: unknown)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(c_plan)) {
            emit(sbn::to_json(sbn::plan(p_d, p_s, p_j)), "");
            return 0;
        }

        if (app.got_subcommand(c_build)) {
            const sbn::Kernel target = sbn::kernel_from_json(sbn::load_json_file(b_target));
            sbn::Network net;
            if (b_arch == "deep") {
                const int j = b_j < 0 ? target.d : b_j;
                sbn::DeepSchedule sched;
                if (b_schedule == "simplified")
                    sched = sbn::DeepSchedule::simplified;
                else if (b_schedule == "overlaid")
                    sched = sbn::DeepSchedule::overlaid;
                else
                    throw std::runtime_error("unknown schedule: " + b_schedule);
                net = sbn::build_deep(target, j, b_eps, sched);
            } else if (b_arch == "shallow-fixed") {
                net = sbn::build_shallow_fixed(target, b_eps, b_scale);
            } else if (b_arch == "shallow-trainable") {
                sbn::TrainableVariant var;
                if (b_variant == "default")
                    var = target.d >= 1 ? sbn::TrainableVariant::anchored
                                        : sbn::TrainableVariant::literal;
                else if (b_variant == "literal")
                    var = sbn::TrainableVariant::literal;
                else if (b_variant == "anchored")
                    var = sbn::TrainableVariant::anchored;
                else
                    throw std::runtime_error("unknown variant: " + b_variant);
                net = sbn::build_shallow_trainable(target, b_eps, b_scale, var);
            } else {
                throw std::runtime_error("unknown arch: " + b_arch);
            }
            sbn::save_json_file(b_out, sbn::to_json(net));
            return 0;
        }

        if (app.got_subcommand(c_eval)) {
            const sbn::Network net = sbn::network_from_json(sbn::load_json_file(e_net));
            emit(sbn::to_json(sbn::network_kernel(net)), e_out);
            return 0;
        }

        if (app.got_subcommand(c_sample)) {
            const sbn::Network net = sbn::network_from_json(sbn::load_json_file(s_net));
            if (!s_seed_set) s_seed = default_seed();
            const sbn::BitVec x = parse_bits(s_input);
            const auto counts = sbn::sample(net, x, s_n, s_seed);
            sbn::json out;
            out["input"] = s_input;
            out["n"] = s_n;
            out["seed"] = s_seed;
            out["counts"] = counts;
            emit(out, s_out);
            return 0;
        }

        if (app.got_subcommand(c_verify)) {
            const sbn::Network net = sbn::network_from_json(sbn::load_json_file(v_net));
            const sbn::Kernel target = sbn::kernel_from_json(sbn::load_json_file(v_target));
            const sbn::Kernel clamped = sbn::clamp_to_eps(target, v_eps);
            const double err = sbn::max_abs_error(sbn::network_kernel(net), clamped);
            const long long N = net.total_units();
            const double bound = sbn::error_bound(v_eps, N);
            sbn::json out;
            out["error"] = err;
            out["bound"] = bound;
            out["N"] = N;
            out["ok"] = err <= bound;
            emit(out, "");
            return err <= bound ? 0 : 1;
        }

        if (app.got_subcommand(c_table)) {
            if (!t_seed_set) t_seed = default_seed();
            if (t_eps.empty()) t_eps = sbn::table8_default_eps();
            const auto rows = sbn::table8(t_trials, t_eps, t_seed, t_mode, t_samples);
            std::cout << sbn::format_experiment_table(rows);
            if (!t_out.empty()) sbn::save_json_file(t_out, sbn::to_json(rows));
            return 0;
        }

        if (app.got_subcommand(c_gray)) {
            sbn::json out = sbn::json::array();
            if (g_partial) {
                const int b = g_b > 0 ? g_b : rank_for(g_s);
                if (b < 0)
                    throw std::runtime_error("no partial code set for this s (need s = 2^(b-1)+b)");
                const auto set = sbn::partial_codes(g_s, b);
                for (const auto& code : set.codes) {
                    sbn::json jc = sbn::json::array();
                    for (const auto& st : code) jc.push_back(st);
                    out.push_back(std::move(jc));
                }
            } else {
                for (const auto& st : sbn::sharing_code(g_s)) out.push_back(st);
            }
            emit(out, "");
            return 0;
        }

        if (app.got_subcommand(c_va)) {
            const auto rep = sbn::validate_arch(va_d, va_s, va_widths, va_params);
            emit(sbn::to_json(rep), "");
            return rep.ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
