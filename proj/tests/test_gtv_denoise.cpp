#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>

#include "gtvtomo/gtv_denoise.hpp"
#include "gtvtomo/noise.hpp"
#include "gtvtomo/phantoms.hpp"
#include "gtvtomo/projector.hpp"
#include "oracles.hpp"

using namespace gtvtomo;

namespace {

constexpr DenoiseConfig kTight{0.0, 1e-30, 20000};

DenoiseConfig tight(double gamma) {
    auto cfg = kTight;
    cfg.gamma = gamma;
    return cfg;
}

using oracle::grid_search_min;

std::vector<double> shepp_logan_noisy_sinogram(int n, double level, std::uint64_t seed, Sinogram* clean_out = nullptr) {
    const auto A = build_projector(Geometry::parallel(n, static_cast<int>(std::ceil(n * 1.5)), 18));
    const auto clean = forward_project(A, generate_phantom(PhantomKind::SheppLogan, n));
    if (clean_out) *clean_out = clean;
    return add_noise(clean, {level, seed}).values;
}

} // namespace

TEST_CASE("gamma = 0 returns the input bitwise after one iteration") {
    std::mt19937_64 rng(1);
    std::vector<double> b(6);
    for (auto& v : b) v = std::normal_distribution<>()(rng);
    const PatchGraph g(6, {{0, 1, 1.0}, {1, 2, 0.5}, {3, 5, 0.2}});
    const auto res = denoise(b, g, {0.0, 1e-6, 500});
    CHECK(res.z == b);
    CHECK(res.trace.iterations_run == 1);
}

TEST_CASE("two-node analytic solution") {
    const PatchGraph g(2, {{0, 1, 1.0}});
    for (auto [t, gamma] : {std::pair{3.0, 1.0}, {2.0, 0.5}, {1.0, 2.0}, {0.4, 0.4}, {5.0, 4.9}}) {
        CAPTURE(t);
        CAPTURE(gamma);
        const std::vector<double> b{0.0, t};
        const std::vector<double> expect =
            t > gamma ? std::vector<double>{gamma / 2, t - gamma / 2} : std::vector<double>{t / 2, t / 2};
        const auto res = denoise(b, g, tight(gamma));
        CHECK(res.z[0] == doctest::Approx(expect[0]).epsilon(1e-6));
        CHECK(res.z[1] == doctest::Approx(expect[1]).epsilon(1e-6));
        // The closed form itself agrees with a brute-force search.
        CHECK(oracle::tv_objective(b, expect, g, gamma) == doctest::Approx(grid_search_min(b, g, gamma)).epsilon(1e-6));
    }
}

TEST_CASE("micro instances reach the grid-search optimum") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int nodes = 2 + trial % 2;
        std::vector<Edge> edges{{0, 1, 0.1 + u(rng)}};
        if (nodes == 3) {
            edges.push_back({1, 2, 0.1 + u(rng)});
            if (u(rng) < 0.5) edges.push_back({0, 2, 0.1 + u(rng)});
        }
        const PatchGraph g(nodes, edges);
        std::vector<double> b(nodes);
        for (auto& v : b) v = 4.0 * u(rng) - 2.0;
        const double gamma = 3.0 * u(rng);
        const auto res = denoise(b, g, tight(gamma));
        CHECK(objective(b, res.z, g, gamma) <= grid_search_min(b, g, gamma) + 1e-3);
    }
}

TEST_CASE("objective") {
    const PatchGraph g(3, {{0, 1, 4.0}, {1, 2, 1.0}});
    const std::vector<double> constant(3, 2.0);
    CHECK(objective(constant, constant, g, 7.0) == 0.0);
    const std::vector<double> b{1.0, 3.0, 0.0};
    // TV = 2*|3-1| + 1*|0-3| = 7.
    CHECK(objective(b, b, g, 0.5) == doctest::Approx(3.5));

    std::mt19937_64 rng(3);
    std::vector<double> z(3), bb(3);
    for (int i = 0; i < 3; ++i) {
        z[i] = std::normal_distribution<>()(rng);
        bb[i] = std::normal_distribution<>()(rng);
    }
    CHECK(objective(bb, z, g, 1.3) == doctest::Approx(oracle::tv_objective(bb, z, g, 1.3)).epsilon(1e-12));
    CHECK_THROWS_AS(objective(b, std::vector<double>{1.0}, g, 1.0), std::invalid_argument);
}

TEST_CASE("constant signals are fixed points for every gamma") {
    const PatchGraph g(4, {{0, 1, 1.0}, {1, 2, 0.3}, {2, 3, 0.8}, {0, 3, 0.1}});
    const std::vector<double> b(4, 1.5);
    for (double gamma : {0.0, 0.1, 10.0}) {
        const auto res = denoise(b, g, {gamma, 1e-6, 500});
        for (double v : res.z) CHECK(v == doctest::Approx(1.5).epsilon(1e-14));
    }
}

TEST_CASE("sinogram-scale behaviour") {
    Sinogram clean;
    const auto b = shepp_logan_noisy_sinogram(32, 0.08, 4, &clean);
    const Sinogram noisy(clean.p, clean.q, b);
    const PatchConfig pc{3, 10};
    const auto g = build_graph(extract_patches(noisy, pc), pc);
    const double gamma = 0.5;

    SUBCASE("objective trace is non-increasing after the first iterations") {
        const auto res = denoise(b, g, {gamma, 1e-14, 400});
        const auto& f = res.trace.objective;
        REQUIRE(f.size() > 6);
        for (std::size_t j = 5; j < f.size(); ++j) REQUIRE(f[j] <= f[j - 1] + 1e-6 * f[0]);
        CHECK(objective(b, res.z, g, gamma) <= objective(b, b, g, gamma) + 1e-9);
    }
    SUBCASE("default tolerance stops early and converges") {
        const auto res = denoise(b, g, {gamma, 1e-6, 500});
        CHECK(res.trace.converged);
        CHECK(res.trace.iterations_run < 500);
        for (double f : res.trace.objective) CHECK(std::isfinite(f));
    }
    SUBCASE("converged output is a fixed point of the iteration") {
        const auto a = denoise(b, g, {gamma, 1e-30, 10000}).z;
        const auto c = denoise(b, g, {gamma, 1e-30, 20000}).z;
        double num = 0, den = 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            num += (a[i] - c[i]) * (a[i] - c[i]);
            den += c[i] * c[i];
        }
        CHECK(std::sqrt(num / den) < 1e-4);
    }
    SUBCASE("paper-literal threshold agrees on a problem with a nonnegative dual") {
        const PatchGraph two(2, {{0, 1, 1.0}});
        const std::vector<double> rising{0.0, 3.0};
        auto cfg = tight(1.0);
        const auto sym = denoise(rising, two, cfg).z;
        cfg.threshold_mode = ThresholdMode::PaperLiteral;
        const auto lit = denoise(rising, two, cfg).z;
        CHECK(lit[0] == doctest::Approx(sym[0]));
        CHECK(lit[1] == doctest::Approx(sym[1]));
    }
}

TEST_CASE("gamma sweep") {
    SUBCASE("single zero gamma returns the input") {
        const PatchGraph g(3, {{0, 1, 1.0}, {1, 2, 1.0}});
        const std::vector<double> b{1.0, -2.0, 0.5};
        const std::vector<double> gammas{0.0};
        const auto res = gamma_sweep(b, g, gammas, [&](std::span<const double> z) {
            double acc = 0;
            for (std::size_t i = 0; i < z.size(); ++i) acc += (z[i] - b[i]) * (z[i] - b[i]);
            return std::sqrt(acc);
        });
        CHECK(res.best_gamma == 0.0);
        CHECK(res.best_z == b);
        CHECK(res.scores == std::vector<double>{0.0});
    }
    SUBCASE("large gamma flattens noise around a constant") {
        std::mt19937_64 rng(9);
        const int nodes = 60;
        std::vector<Edge> edges;
        for (int i = 0; i < nodes; ++i)
            for (int j = i + 1; j < nodes; ++j)
                if (j - i <= 3) edges.push_back({i, j, 1.0});
        const PatchGraph g(nodes, edges);
        std::vector<double> b(nodes);
        for (auto& v : b) v = 2.0 + 0.3 * std::normal_distribution<>()(rng);
        const std::vector<double> gammas{0.0, 5.0};
        auto to_constant = [](std::span<const double> z) {
            double acc = 0;
            for (double v : z) acc += (v - 2.0) * (v - 2.0);
            return acc;
        };
        const auto res = gamma_sweep(b, g, gammas, to_constant, {0.0, 1e-12, 5000});
        CHECK(res.best_gamma == 5.0);
        auto variance = [](const std::vector<double>& v) {
            double m = 0, s = 0;
            for (double x : v) m += x / v.size();
            for (double x : v) s += (x - m) * (x - m) / v.size();
            return s;
        };
        CHECK(variance(res.best_z) < variance(b) / 10.0);
    }
    SUBCASE("ties go to the smaller gamma") {
        const PatchGraph g(2, {{0, 1, 1.0}});
        const std::vector<double> b{0.0, 1.0};
        const std::vector<double> gammas{3.0, 0.5, 1.0};
        const auto res = gamma_sweep(b, g, gammas, [](std::span<const double>) { return 1.0; });
        CHECK(res.best_gamma == 0.5);
        CHECK(res.scores.size() == 3);
    }
    CHECK_THROWS_AS(gamma_sweep(std::vector<double>{0.0, 1.0}, PatchGraph(2, {{0, 1, 1.0}}), std::vector<double>{},
                                [](std::span<const double>) { return 0.0; }),
                    std::invalid_argument);
}

TEST_CASE("default gamma grid") {
    const auto grid = default_gamma_grid();
    REQUIRE(grid.size() == 22);
    CHECK(grid[0] == 0.0);
    CHECK(grid[1] == doctest::Approx(1e-3));
    CHECK(grid.back() == doctest::Approx(20.0));
    CHECK(std::is_sorted(grid.begin(), grid.end()));
}

TEST_CASE("input validation") {
    const PatchGraph g(2, {{0, 1, 1.0}});
    CHECK_THROWS_AS(denoise(std::vector<double>{1.0}, g, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(denoise(std::vector<double>{1.0, NAN}, g, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(denoise(std::vector<double>{1.0, 2.0}, g, {-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(denoise(std::vector<double>{1.0, 2.0}, g, {1.0, 0.0}), std::invalid_argument);
}
