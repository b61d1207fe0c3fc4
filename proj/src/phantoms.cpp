#include "gtvtomo/phantoms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace gtvtomo {

namespace {

struct Ellipse {
    double intensity, semi_x, semi_y, cx, cy, phi_deg;
};

// Modified Shepp-Logan (Toft): the original geometry with contrast raised so
// that interior structures are visible on a [0, 1] scale.
constexpr std::array<Ellipse, 10> kSheppLogan{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
}};

// Area-sampled: each pixel averages a kSubsamples x kSubsamples grid of
// point evaluations, so the image is consistent across resolutions.
constexpr int kSubsamples = 4;

double shepp_logan_at(double x, double y) {
    double v = 0.0;
    for (const auto& e : kSheppLogan) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = x - e.cx;
        const double dy = y - e.cy;
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double w = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((u * u) / (e.semi_x * e.semi_x) + (w * w) / (e.semi_y * e.semi_y) <= 1.0) v += e.intensity;
    }
    // 1 - 0.8 - 0.2 may round slightly below zero.
    return std::max(v, 0.0);
}

Image shepp_logan(int n) {
    Image img(n);
    const double scale = 2.0 / n; // pixel units -> [-1, 1]
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int sr = 0; sr < kSubsamples; ++sr)
                for (int sc = 0; sc < kSubsamples; ++sc) {
                    const double x = (c + (sc + 0.5) / kSubsamples) * scale - 1.0;
                    const double y = 1.0 - (r + (sr + 0.5) / kSubsamples) * scale;
                    acc += shepp_logan_at(x, y);
                }
            img.at(r, c) = acc / (kSubsamples * kSubsamples);
        }
    return img;
}

Image smooth(int n) {
    // Four bumps, positions as fractions of n, 1-based pixel coordinates.
    constexpr std::array<std::array<double, 3>, 4> bumps{{
        {0.6, 0.6, 1.0},
        {0.5, 0.3, 0.5},
        {0.2, 0.7, 0.7},
        {0.8, 0.2, 0.9},
    }};
    const double sigma = 0.25 * n;
    Image img(n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const double i = r + 1.0;
            const double j = c + 1.0;
            double v = 0.0;
            for (const auto& [fi, fj, amp] : bumps) {
                const double di = i - fi * n;
                const double dj = j - fj * n;
                v += amp * std::exp(-di * di / ((1.2 * sigma) * (1.2 * sigma)) - dj * dj / (sigma * sigma));
            }
            img.at(r, c) = v;
        }
    }
    return img;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// White noise blurred by a separable Gaussian with mirrored borders.
std::vector<double> smooth_random_field(int n, double sigma, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> field(static_cast<std::size_t>(n) * n);
    for (auto& v : field) v = normal(rng);

    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    for (int k = -radius; k <= radius; ++k) kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));

    auto mirror = [n](int i) {
        while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
        return i;
    };
    std::vector<double> tmp(field.size());
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * field[r * n + mirror(c + k)];
            tmp[r * n + c] = acc;
        }
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * tmp[mirror(r + k) * n + c];
            field[r * n + c] = acc;
        }
    return field;
}

// Value below which a fraction `q` of the samples fall.
double quantile(std::vector<double> values, double q) {
    const auto k = static_cast<std::size_t>(q * static_cast<double>(values.size() - 1));
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k), values.end());
    return values[k];
}

Image binary(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto field = smooth_random_field(n, n / 12.0, rng);
    const double level = quantile(field, 0.6);
    Image img(n);
    for (std::size_t i = 0; i < field.size(); ++i) img.pixels[i] = field[i] > level ? 1.0 : 0.0;
    return img;
}

Image four_phases(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const auto field = smooth_random_field(n, n / 12.0, rng);
    const std::array<double, 3> cuts{quantile(field, 0.25), quantile(field, 0.5), quantile(field, 0.75)};
    Image img(n);
    for (std::size_t i = 0; i < field.size(); ++i) {
        const auto level = std::count_if(cuts.begin(), cuts.end(), [&](double c) { return field[i] > c; });
        img.pixels[i] = static_cast<double>(level) / 3.0;
    }
    return img;
}

Image grains(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const int cells = std::max(2, static_cast<int>(std::lround(3.0 * std::sqrt(n))));
    struct Site {
        double r, c, value;
    };
    std::vector<Site> sites(cells);
    for (auto& s : sites) {
        s.r = uniform01(rng) * n;
        s.c = uniform01(rng) * n;
        s.value = uniform01(rng);
    }
    // Guarantee contrast even for an unlucky draw.
    sites[0].value = 0.0;
    sites[1].value = 1.0;

    Image img(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            double best = INFINITY;
            double value = 0.0;
            for (const auto& s : sites) {
                const double d = (s.r - r - 0.5) * (s.r - r - 0.5) + (s.c - c - 0.5) * (s.c - c - 0.5);
                if (d < best) {
                    best = d;
                    value = s.value;
                }
            }
            img.at(r, c) = value;
        }
    return img;
}

// Nonnegative phantoms are divided by their maximum so zero stays zero.
void rescale_unit(Image& img) {
    const auto [lo, hi] = std::minmax_element(img.pixels.begin(), img.pixels.end());
    const double min = *lo >= 0.0 ? 0.0 : *lo;
    const double range = *hi - min;
    if (range <= 0.0) {
        std::fill(img.pixels.begin(), img.pixels.end(), 0.0);
        return;
    }
    for (auto& v : img.pixels) v = (v - min) / range;
}

} // namespace

std::string_view to_string(PhantomKind kind) {
    switch (kind) {
    case PhantomKind::SheppLogan: return "shepplogan";
    case PhantomKind::Smooth: return "smooth";
    case PhantomKind::Binary: return "binary";
    case PhantomKind::Grains: return "grains";
    case PhantomKind::FourPhases: return "fourphases";
    }
    return "unknown";
}

PhantomKind parse_phantom_kind(std::string_view name) {
    for (auto kind : {PhantomKind::SheppLogan, PhantomKind::Smooth, PhantomKind::Binary, PhantomKind::Grains,
                      PhantomKind::FourPhases})
        if (to_string(kind) == name) return kind;
    throw std::invalid_argument("unknown phantom kind: " + std::string(name));
}

Image generate_phantom(PhantomKind kind, int n, std::uint64_t seed) {
    if (n < 8) throw std::invalid_argument("phantom side length must be at least 8");
    Image img;
    switch (kind) {
    case PhantomKind::SheppLogan: img = shepp_logan(n); break;
    case PhantomKind::Smooth: img = smooth(n); break;
    case PhantomKind::Binary: img = binary(n, seed); break;
    case PhantomKind::Grains: img = grains(n, seed); break;
    case PhantomKind::FourPhases: img = four_phases(n, seed); break;
    }
    rescale_unit(img);
    return img;
}

} // namespace gtvtomo
