#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sbn/net.hpp"
#include "sbn/rng.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

using namespace sbn;

namespace {

Layer make_layer(const std::vector<std::vector<double>>& W, const std::vector<double>& b) {
    Layer L;
    L.W = W;
    L.b = b;
    return L;
}

// random dense net for oracle comparisons; weights in [-4,4]
Network random_net(std::uint64_t seed, int d, const std::vector<int>& widths) {
    Network net;
    net.d = d;
    int in = d;
    for (std::size_t l = 0; l < widths.size(); ++l) {
        Layer L;
        L.W.assign(widths[l], std::vector<double>(in));
        L.b.assign(widths[l], 0.0);
        for (int i = 0; i < widths[l]; ++i) {
            for (int k = 0; k < in; ++k)
                L.W[i][k] = 8.0 * (uniform01(hash_key(seed, l, i, k)) - 0.5);
            L.b[i] = 8.0 * (uniform01(hash_key(seed, l, i, 1000)) - 0.5);
        }
        net.layers.push_back(std::move(L));
        in = widths[l];
    }
    return net;
}

double max_diff(const Kernel& a, const Kernel& b) {
    double m = 0.0;
    for (std::size_t r = 0; r < a.rows.size(); ++r)
        for (std::size_t c = 0; c < a.rows[r].size(); ++c)
            m = std::max(m, std::abs(a.rows[r][c] - b.rows[r][c]));
    return m;
}

} // namespace

TEST_CASE("sigmoid and logit are inverse and stable") {
    CHECK(sigmoid(0.0) == doctest::Approx(0.5));
    CHECK(logit(0.975) == doctest::Approx(std::log(39.0)));
    for (double p : {1e-12, 0.3, 0.5, 0.9, 1.0 - 1e-12})
        CHECK(sigmoid(logit(p)) == doctest::Approx(p).epsilon(1e-12));
    CHECK(sigmoid(-800.0) == doctest::Approx(0.0));
    CHECK(sigmoid(800.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(logit(0.0), std::domain_error);
    CHECK_THROWS_AS(logit(1.0), std::domain_error);
}

TEST_CASE("single copy unit kernel") {
    const double eps = 0.025;
    const double g = logit(1.0 - eps);
    Network net;
    net.d = 1;
    net.layers.push_back(make_layer({{2.0 * g}}, {-g}));
    Kernel K = network_kernel(net);
    CHECK(K.rows[0][0] == doctest::Approx(1.0 - eps)); // 0 stays 0
    CHECK(K.rows[1][1] == doctest::Approx(1.0 - eps)); // 1 stays 1

    // two copy layers: direct survival plus the double-flip path
    net.layers.push_back(make_layer({{2.0 * g}}, {-g}));
    K = network_kernel(net);
    const double stay = (1.0 - eps) * (1.0 - eps) + eps * eps;
    CHECK(K.rows[1][1] == doctest::Approx(stay)); // 0.95125
}

TEST_CASE("bias-only layer factorizes over units") {
    // p1 = 0.3, p2 = 0.8; states ordered (00,10,01,11)
    Layer L = make_layer({{}, {}}, {logit(0.3), logit(0.8)});
    L.W = {{0.0}, {0.0}};
    Network net;
    net.d = 1;
    net.layers.push_back(L);
    Kernel K = network_kernel(net);
    for (int r = 0; r < 2; ++r) {
        CHECK(K.rows[r][0] == doctest::Approx(0.14));
        CHECK(K.rows[r][1] == doctest::Approx(0.06));
        CHECK(K.rows[r][2] == doctest::Approx(0.56));
        CHECK(K.rows[r][3] == doctest::Approx(0.24));
    }
}

TEST_CASE("product_expand matches closed form") {
    ProductDistribution p{{2.0 / 3.0, 6.0 / 7.0, 7.0 / 8.0}};
    std::vector<double> full = product_expand(p);
    REQUIRE(full.size() == 8);
    CHECK(full[0] == doctest::Approx(1.0 / 168.0)); // all zeros
    CHECK(full[7] == doctest::Approx(2.0 / 3.0 * 6.0 / 7.0 * 7.0 / 8.0));
    double sum = 0.0;
    for (double v : full) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("network_kernel equals the explicit-enumeration oracle") {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const int d = 1 + static_cast<int>(seed % 3);
        std::vector<int> widths;
        switch (seed % 4) {
            case 0: widths = {4, 3, 2}; break;
            case 1: widths = {5, 5, 2}; break;
            case 2: widths = {3, 4, 3, 1}; break;
            default: widths = {6, 4, 2}; break;
        }
        Network net = random_net(seed, d, widths);
        Kernel fast = network_kernel(net);
        Kernel brute = network_kernel_bruteforce(net);
        CHECK(max_diff(fast, brute) < 1e-12);
        for (const auto& row : fast.rows) {
            double s = 0.0;
            for (double v : row) s += v;
            CHECK(std::abs(s - 1.0) < 1e-12);
        }
        ++checked;
    }
    CHECK(checked == 30);
}

TEST_CASE("oracle handles a 24-hidden-unit network") {
    Network net = random_net(99, 1, {8, 8, 8, 2});
    CHECK(net.hidden_units() == 24);
    Kernel fast = network_kernel(net);
    Kernel brute = network_kernel_bruteforce(net);
    // 2^24 summed paths accumulate a little more rounding than small nets
    CHECK(max_diff(fast, brute) < 1e-10);
    Network too_big = random_net(99, 1, {8, 8, 9, 2});
    CHECK_THROWS_AS(network_kernel_bruteforce(too_big), std::invalid_argument);
}

TEST_CASE("compose is associative and row-stochastic") {
    Network net = random_net(7, 2, {3, 3, 2});
    Kernel a = layer_kernel(net.layers[0]);
    Kernel b = layer_kernel(net.layers[1]);
    Kernel c = layer_kernel(net.layers[2]);
    Kernel left = compose(compose(a, b), c);
    Kernel right = compose(a, compose(b, c));
    CHECK(max_diff(left, right) < 1e-12);
    Kernel bad;
    bad.d = 1;
    bad.s = 1;
    bad.rows = {{0.5, 0.5}, {0.5, 0.5}};
    CHECK_THROWS_AS(compose(a, bad), std::invalid_argument);
}

TEST_CASE("sampling frequencies track the exact kernel") {
    Network net = random_net(21, 2, {4, 3, 2});
    Kernel K = network_kernel(net);
    const long long n = 200000;
    for (std::uint64_t xi = 0; xi < 4; ++xi) {
        BitVec x = bin(xi, 2);
        std::vector<std::uint64_t> counts = sample(net, x, n, 5);
        REQUIRE(counts.size() == 4);
        std::uint64_t total = 0;
        for (auto c : counts) total += c;
        CHECK(total == static_cast<std::uint64_t>(n));
        for (int y = 0; y < 4; ++y) {
            const double p = K.rows[xi][y];
            const double freq = static_cast<double>(counts[y]) / n;
            const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
            CHECK(std::abs(freq - p) < 5.0 * sigma + 1e-9);
        }
    }
    // reproducible
    CHECK(sample(net, {0, 0}, 1000, 5) == sample(net, {0, 0}, 1000, 5));
    CHECK(sample(net, {0, 0}, 1000, 5) != sample(net, {0, 0}, 1000, 6));
}

TEST_CASE("mutual information") {
    // perfectly correlated two-bit pair: 2 bits
    std::vector<std::vector<double>> ident(4, std::vector<double>(4, 0.0));
    for (int i = 0; i < 4; ++i) ident[i][i] = 0.25;
    CHECK(mutual_information(ident) == doctest::Approx(2.0).epsilon(1e-12));
    // independent: 0 bits
    std::vector<std::vector<double>> indep(2, std::vector<double>(2, 0.25));
    CHECK(mutual_information(indep) == doctest::Approx(0.0).epsilon(1e-12));
    // not a distribution
    std::vector<std::vector<double>> bad(2, std::vector<double>(2, 0.3));
    CHECK_THROWS_AS(mutual_information(bad), std::invalid_argument);
}

TEST_CASE("width-1 bottleneck caps mutual information at one bit") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Network net = random_net(seed, 2, {3, 1, 3, 2});
        Kernel K = network_kernel(net);
        std::vector<std::vector<double>> joint(4, std::vector<double>(4));
        for (int x = 0; x < 4; ++x)
            for (int y = 0; y < 4; ++y) joint[x][y] = 0.25 * K.rows[x][y];
        CHECK(mutual_information(joint) <= 1.0 + 1e-9);
    }
}

TEST_CASE("clamp_row projection") {
    std::vector<double> row{1.0, 0.0, 0.0, 0.0};
    clamp_row(row, 0.01);
    CHECK(row[0] == doctest::Approx(0.97));
    CHECK(row[1] == doctest::Approx(0.01));
    CHECK(row[2] == doctest::Approx(0.01));
    CHECK(row[3] == doctest::Approx(0.01));

    // idempotent on already-interior rows
    std::vector<double> again = row;
    clamp_row(again, 0.01);
    for (int i = 0; i < 4; ++i) CHECK(again[i] == doctest::Approx(row[i]).epsilon(1e-15));

    // sum preserved exactly for a messier row
    std::vector<double> r2{0.5, 0.4, 0.09, 0.005, 0.003, 0.002, 0.0, 0.0};
    clamp_row(r2, 0.01);
    double s = 0.0;
    for (double v : r2) {
        CHECK(v >= 0.01);
        s += v;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));

    std::vector<double> r3{0.5, 0.5};
    CHECK_THROWS_AS(clamp_row(r3, 0.6), std::invalid_argument); // eps*K >= 1
}

TEST_CASE("network and kernel validation") {
    Network net = random_net(3, 2, {3, 2});
    CHECK_NOTHROW(check_network(net));
    net.layers[1].W[0].push_back(0.0); // widths no longer chain
    CHECK_THROWS_AS(check_network(net), std::invalid_argument);

    Kernel k;
    k.d = 1;
    k.s = 1;
    k.rows = {{0.5, 0.5}}; // missing a row
    CHECK_THROWS_AS(check_kernel(k), std::invalid_argument);
    k.rows = {{0.5, 0.5}, {0.25, 0.25, 0.25, 0.25}}; // row length mismatch
    CHECK_THROWS_AS(check_kernel(k), std::invalid_argument);
}
