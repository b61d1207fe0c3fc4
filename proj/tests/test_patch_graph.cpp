#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>

#include "gtvtomo/patch_graph.hpp"
#include "oracles.hpp"

using namespace gtvtomo;

namespace {

using oracle::EdgeSet;
using oracle::brute_force_knn;
using oracle::dense_largest_singular_value;
using oracle::edge_set;

PatchSet random_points(int count, int dim, std::mt19937_64& rng, bool quantized = false) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    PatchSet set;
    set.dim = dim;
    set.data.resize(static_cast<std::size_t>(count) * dim);
    // Quantized coordinates produce many exact distance ties.
    for (auto& v : set.data) v = quantized ? std::floor(d(rng) * 4.0) : d(rng);
    return set;
}

PatchGraph random_graph(int nodes, std::mt19937_64& rng, double density = 0.3) {
    std::uniform_real_distribution<double> d(0.0, 1.0);
    std::vector<Edge> edges;
    for (int i = 0; i < nodes; ++i)
        for (int j = i + 1; j < nodes; ++j)
            if (d(rng) < density || j == i + 1) edges.push_back({i, j, d(rng) * 2.0});
    return PatchGraph(nodes, std::move(edges));
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

} // namespace

TEST_CASE("patch extraction: count, constant field, replicate padding") {
    SUBCASE("95x36 with 3x3 patches") {
        const auto set = extract_patches(Sinogram(95, 36, 1.0), {3, 10});
        CHECK(set.count() == 3420);
        CHECK(set.dim == 9);
    }
    SUBCASE("constant sinogram") {
        const auto set = extract_patches(Sinogram(12, 7, 5.0), {3, 2});
        for (double v : set.data) REQUIRE(v == 5.0);
    }
    SUBCASE("border patches match an explicitly padded array") {
        std::mt19937_64 rng(1);
        const int p = 9, q = 6, l = 5, h = 2;
        Sinogram s(p, q);
        for (auto& v : s.values) v = std::normal_distribution<double>()(rng);
        // Padded copy built independently of the implementation.
        std::vector<std::vector<double>> padded(p + 2 * h, std::vector<double>(q + 2 * h));
        for (int r = 0; r < p + 2 * h; ++r)
            for (int c = 0; c < q + 2 * h; ++c) {
                const int rr = r < h ? 0 : (r >= p + h ? p - 1 : r - h);
                const int cc = c < h ? 0 : (c >= q + h ? q - 1 : c - h);
                padded[r][c] = s.at(rr, cc);
            }
        const auto set = extract_patches(s, {l, 3});
        for (auto [r, c] : {std::pair{0, 0}, {0, q - 1}, {p - 1, 0}, {p - 1, q - 1}, {4, 3}}) {
            const auto patch = set.patch(static_cast<std::size_t>(r) * q + c);
            int idx = 0;
            for (int dr = 0; dr < l; ++dr)
                for (int dc = 0; dc < l; ++dc) REQUIRE(patch[idx++] == padded[r + dr][c + dc]);
        }
    }
    CHECK_THROWS_AS(extract_patches(Sinogram(4, 4), {4, 1}), std::invalid_argument);
    CHECK_THROWS_AS(extract_patches(Sinogram(2, 2), {5, 1}), std::invalid_argument);
}

TEST_CASE("identical patches: sigma falls back to 1 and weights are 1") {
    PatchSet set{2, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5}};
    const auto g = build_graph(set, {1, 1});
    CHECK(g.sigma() == 1.0);
    REQUIRE(g.edge_count() >= 1);
    for (const auto& e : g.edges()) CHECK(e.weight == 1.0);
    // Ties go to the lower index: 0->1, 1->0, 2->0.
    CHECK(edge_set(g) == EdgeSet{{0, 1}, {0, 2}});
}

TEST_CASE("points on a line, K = 1") {
    PatchSet set{1, {0.0, 1.0, 2.0, 3.0, 10.0}};
    const auto g = build_graph(set, {1, 1});
    // 0->1, 1->0 (tie 0/2 -> lower), 2->1 (tie 1/3 -> lower), 3->2, 4->3.
    CHECK(edge_set(g) == EdgeSet{{0, 1}, {1, 2}, {2, 3}, {3, 4}});
    CHECK(edge_set(g) == brute_force_knn(set, 1));
    // sigma = mean directed distance = (1 + 1 + 1 + 1 + 7) / 5.
    CHECK(g.sigma() == doctest::Approx(11.0 / 5.0));
    CHECK(g.weight(3, 4) == doctest::Approx(std::exp(-49.0 / (2.2 * 2.2))));
}

TEST_CASE("K-NN edge set matches brute force") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const int count = 11 + static_cast<int>(rng() % 190);
        const auto set = random_points(count, 1 + trial % 9, rng, trial % 3 == 0);
        for (int k : {1, 5, 10}) {
            CAPTURE(count);
            CAPTURE(k);
            const auto g = build_graph(set, {1, k});
            REQUIRE(edge_set(g) == brute_force_knn(set, k));
            for (double d : g.degree()) REQUIRE(d > 0.0);
        }
    }
}

TEST_CASE("graph invariants: symmetry, degrees, sigma, fixed sigma") {
    std::mt19937_64 rng(5);
    const auto set = random_points(60, 9, rng);
    const auto g = build_graph(set, {1, 4});
    std::vector<double> degree(60, 0.0);
    double dist_sum = 0;
    for (const auto& e : g.edges()) {
        CHECK(e.i < e.j);
        CHECK(g.weight(e.i, e.j) == g.weight(e.j, e.i));
        CHECK(e.weight > 0.0);
        CHECK(e.weight <= 1.0);
        degree[e.i] += e.weight;
        degree[e.j] += e.weight;
    }
    for (int i = 0; i < 60; ++i) CHECK(g.degree()[i] == doctest::Approx(degree[i]).epsilon(1e-12));
    CHECK(g.weight(3, 3) == 0.0);
    (void)dist_sum;

    PatchConfig fixed{1, 4, SigmaRule::Fixed, 0.7};
    const auto gf = build_graph(set, fixed);
    CHECK(gf.sigma() == 0.7);
    const auto& e = gf.edges().front();
    double d2 = 0;
    for (std::size_t c = 0; c < 9; ++c) d2 += std::pow(set.patch(e.i)[c] - set.patch(e.j)[c], 2);
    CHECK(e.weight == doctest::Approx(std::exp(-d2 / 0.49)).epsilon(1e-12));
}

TEST_CASE("sigma is the mean directed K-NN distance") {
    std::mt19937_64 rng(8);
    const auto set = random_points(40, 3, rng);
    const int k = 3;
    double sum = 0;
    for (int i = 0; i < 40; ++i) {
        std::vector<double> d;
        for (int j = 0; j < 40; ++j) {
            if (j == i) continue;
            double acc = 0;
            for (int c = 0; c < 3; ++c) acc += std::pow(set.patch(i)[c] - set.patch(j)[c], 2);
            d.push_back(std::sqrt(acc));
        }
        std::sort(d.begin(), d.end());
        for (int m = 0; m < k; ++m) sum += d[m];
    }
    CHECK(build_graph(set, {1, k}).sigma() == doctest::Approx(sum / (40.0 * k)).epsilon(1e-12));
}

TEST_CASE("build_graph rejects too few patches and bad configs") {
    PatchSet set{1, {0.0, 1.0, 2.0}};
    CHECK_THROWS_AS(build_graph(set, {1, 3}), std::invalid_argument);
    CHECK_THROWS_AS(build_graph(set, {2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(build_graph(set, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(PatchGraph(3, {{1, 0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(PatchGraph(3, {{0, 1, 1.0}, {0, 1, 2.0}}), std::invalid_argument);
    CHECK_THROWS_AS(PatchGraph(3, {{0, 1, -1.0}}), std::invalid_argument);
}

TEST_CASE("gradient and divergence on a 2-node graph") {
    const PatchGraph g(2, {{0, 1, 4.0}});
    const std::vector<double> z{1.0, 3.0};
    const auto grad = graph_gradient(g, z);
    REQUIRE(grad.size() == 1);
    CHECK(grad[0] == doctest::Approx(4.0));
    const auto div = graph_divergence(g, std::vector<double>{1.0});
    CHECK(div[0] == doctest::Approx(-2.0));
    CHECK(div[1] == doctest::Approx(2.0));
    CHECK(graph_divergence(g, std::vector<double>{0.0}) == std::vector<double>{0.0, 0.0});
    CHECK_THROWS_AS(graph_gradient(g, std::vector<double>{1.0}), std::invalid_argument);
    CHECK_THROWS_AS(graph_divergence(g, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("gradient of a constant vanishes, and so does its divergence") {
    std::mt19937_64 rng(2);
    const auto g = random_graph(30, rng);
    const std::vector<double> c(30, 2.5);
    const auto grad = graph_gradient(g, c);
    for (double v : grad) CHECK(v == 0.0);
    for (double v : graph_divergence(g, grad)) CHECK(v == 0.0);
}

TEST_CASE("l1 norm of the gradient equals the pairwise TV sum") {
    std::mt19937_64 rng(4);
    const auto g = random_graph(20, rng);
    const auto z = random_vector(20, rng);
    double tv = 0;
    for (int i = 0; i < 20; ++i)
        for (int j = i + 1; j < 20; ++j) tv += std::sqrt(g.weight(i, j)) * std::abs(z[i] - z[j]);
    double l1 = 0;
    for (double v : graph_gradient(g, z)) l1 += std::abs(v);
    CHECK(l1 == doctest::Approx(tv).epsilon(1e-12));
}

TEST_CASE("divergence is the adjoint of the gradient") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        const int nodes = 5 + static_cast<int>(rng() % 96);
        const auto g = random_graph(nodes, rng, 0.2);
        const auto z = random_vector(nodes, rng);
        const auto u = random_vector(g.edge_count(), rng);
        const double lhs = dot(graph_gradient(g, z), u);
        const double rhs = dot(z, graph_divergence(g, u));
        REQUIRE(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1.0));
    }
}

TEST_CASE("spectral norm") {
    SUBCASE("2-node unit edge") {
        const PatchGraph g(2, {{0, 1, 1.0}});
        CHECK(spectral_norm(g) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
        CHECK(g.tau() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    }
    SUBCASE("matches a dense SVD and respects the degree bound") {
        std::mt19937_64 rng(13);
        for (int trial = 0; trial < 20; ++trial) {
            const int nodes = 3 + static_cast<int>(rng() % 48);
            const auto g = random_graph(nodes, rng);
            const double expected = dense_largest_singular_value(g);
            CAPTURE(nodes);
            CHECK(g.tau() == doctest::Approx(expected).epsilon(1e-6));
            const double max_degree = *std::max_element(g.degree().begin(), g.degree().end());
            CHECK(g.tau() * g.tau() <= 2.0 * max_degree + 1e-9);
        }
    }
    CHECK_THROWS_AS(spectral_norm(PatchGraph(3, {})), std::invalid_argument);
}

TEST_CASE("full-size configuration has at least pq*K/2 edges") {
    std::mt19937_64 rng(1);
    Sinogram s(95, 36);
    for (int r = 0; r < 95; ++r)
        for (int c = 0; c < 36; ++c) s.at(r, c) = std::sin(r * 0.1 + c * 0.3) + 0.05 * std::normal_distribution<>()(rng);
    const auto g = build_graph(extract_patches(s, {3, 10}), {3, 10});
    CHECK(g.node_count() == 3420);
    CHECK(g.edge_count() >= 3420u * 10u / 2u);
    const double max_degree = *std::max_element(g.degree().begin(), g.degree().end());
    CHECK(g.tau() * g.tau() <= 2.0 * max_degree + 1e-9);
}
