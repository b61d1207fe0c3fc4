#include "gtvtomo/recon.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include <fftw3.h>

#include "gtvtomo/errors.hpp"

namespace gtvtomo {

namespace {

constexpr double kDivergenceNorm = 1e12;

void check_dimensions(const ProjectionOperator& A, std::span<const double> b, const Image& x0, const char* who) {
    if (b.size() != A.rows())
        throw std::invalid_argument(std::string(who) + ": measurement vector has " + std::to_string(b.size()) +
                                    " entries, operator has " + std::to_string(A.rows()) + " rows");
    if (x0.size() != A.cols() || static_cast<std::size_t>(x0.n) * x0.n != x0.size())
        throw std::invalid_argument(std::string(who) + ": initial image does not match operator columns");
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
    void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using PlanPtr = std::unique_ptr<fftw_plan_s, PlanDestroy>;

std::size_t next_pow2(std::size_t v) {
    std::size_t out = 1;
    while (out < v) out <<= 1;
    return out;
}

double window(FbpFilter filter, double w) { // w in [0, 1], 1 = Nyquist
    switch (filter) {
    case FbpFilter::RamLak: return 1.0;
    case FbpFilter::SheppLogan: {
        const double a = 0.5 * std::numbers::pi * w;
        return a == 0.0 ? 1.0 : std::sin(a) / a;
    }
    case FbpFilter::Cosine: return std::cos(0.5 * std::numbers::pi * w);
    }
    return 1.0;
}

// Frequency response of the spatially sampled ramp kernel
// h[0] = 1/(4d^2), h[k odd] = -1/(pi k d)^2, h[k even] = 0, times the window.
std::vector<double> ramp_response(std::size_t padded, double spacing, FbpFilter filter) {
    const std::size_t bins = padded / 2 + 1;
    std::unique_ptr<double, FftwFree> kernel(static_cast<double*>(fftw_malloc(sizeof(double) * padded)));
    std::unique_ptr<fftw_complex, FftwFree> spectrum(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
    double* h = kernel.get();
    std::fill(h, h + padded, 0.0);
    h[0] = 1.0 / (4.0 * spacing * spacing);
    for (std::size_t k = 1; k < padded / 2; k += 2) {
        const double v = -1.0 / std::pow(std::numbers::pi * static_cast<double>(k) * spacing, 2);
        h[k] = v;
        h[padded - k] = v;
    }
    PlanPtr plan(fftw_plan_dft_r2c_1d(static_cast<int>(padded), h, spectrum.get(), FFTW_ESTIMATE));
    fftw_execute(plan.get());

    std::vector<double> response(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        const double w = static_cast<double>(k) / static_cast<double>(padded / 2);
        response[k] = spectrum.get()[k][0] * window(filter, w);
    }
    return response;
}

} // namespace

void ArtConfig::validate() const {
    if (!(lambda > 0.0 && lambda < 2.0)) throw std::invalid_argument("ART relaxation must lie in (0, 2)");
    if (sweeps < 1) throw std::invalid_argument("ART needs at least one sweep");
}

void SirtConfig::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("SIRT relaxation must be positive");
    if (iterations < 1) throw std::invalid_argument("SIRT needs at least one iteration");
}

Image fbp(const Sinogram& s, const Geometry& geometry, const FbpConfig& cfg) {
    geometry.validate();
    if (s.p != geometry.p || s.q != geometry.q || s.size() != geometry.rows())
        throw std::invalid_argument("fbp: sinogram shape does not match geometry");

    const std::size_t p = static_cast<std::size_t>(s.p);
    const std::size_t padded = next_pow2(2 * p);
    const std::size_t bins = padded / 2 + 1;
    const double spacing = geometry.detector_spacing();
    const auto response = ramp_response(padded, spacing, cfg.filter);

    std::unique_ptr<double, FftwFree> signal(static_cast<double*>(fftw_malloc(sizeof(double) * padded)));
    std::unique_ptr<fftw_complex, FftwFree> spectrum(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
    PlanPtr forward(fftw_plan_dft_r2c_1d(static_cast<int>(padded), signal.get(), spectrum.get(), FFTW_ESTIMATE));
    PlanPtr inverse(fftw_plan_dft_c2r_1d(static_cast<int>(padded), spectrum.get(), signal.get(), FFTW_ESTIMATE));

    // filtered[angle][ray]
    std::vector<std::vector<double>> filtered(s.q, std::vector<double>(p));
    for (int k = 0; k < s.q; ++k) {
        double* buf = signal.get();
        std::fill(buf, buf + padded, 0.0);
        for (std::size_t r = 0; r < p; ++r) buf[r] = s.at(static_cast<int>(r), k);
        fftw_execute(forward.get());
        for (std::size_t f = 0; f < bins; ++f) {
            spectrum.get()[f][0] *= response[f];
            spectrum.get()[f][1] *= response[f];
        }
        fftw_execute(inverse.get());
        // FFTW's inverse is unnormalized; the extra spacing factor turns the
        // discrete sum into the convolution integral.
        const double scale = spacing / static_cast<double>(padded);
        for (std::size_t r = 0; r < p; ++r) filtered[k][r] = buf[r] * scale;
    }

    const int n = geometry.n;
    const double half = n / 2.0;
    const double centre = (static_cast<double>(p) - 1.0) / 2.0;
    std::vector<double> cosines(s.q), sines(s.q);
    for (int k = 0; k < s.q; ++k) {
        const double rad = geometry.angles_deg[k] * std::numbers::pi / 180.0;
        cosines[k] = std::cos(rad);
        sines[k] = std::sin(rad);
    }

    Image img(n);
    const double last = static_cast<double>(p) - 1.0;
    for (int r = 0; r < n; ++r) {
        const double y = half - r - 0.5;
        for (int c = 0; c < n; ++c) {
            const double x = c + 0.5 - half;
            double acc = 0.0;
            for (int k = 0; k < s.q; ++k) {
                const double u = (x * cosines[k] + y * sines[k]) / spacing + centre;
                const auto& prof = filtered[k];
                if (cfg.interpolation == Interpolation::Nearest) {
                    const double idx = std::round(u);
                    if (idx >= 0.0 && idx <= last) acc += prof[static_cast<std::size_t>(idx)];
                } else {
                    if (u < 0.0 || u > last) continue;
                    const auto lo = static_cast<std::size_t>(std::floor(u));
                    const double frac = u - static_cast<double>(lo);
                    const double hi_val = lo + 1 < p ? prof[lo + 1] : 0.0;
                    acc += (1.0 - frac) * prof[lo] + frac * hi_val;
                }
            }
            img.at(r, c) = acc * std::numbers::pi / s.q;
        }
    }
    return img;
}

ReconResult art(const ProjectionOperator& A, std::span<const double> b, const ArtConfig& cfg, const Image& x0,
                const IterateTracker& tracker) {
    cfg.validate();
    check_dimensions(A, b, x0, "art");

    ReconResult out{x0, {{}, "ART"}};
    auto& x = out.image.pixels;
    const auto& norms = A.row_norms_sq();
    std::vector<std::size_t> order(A.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(cfg.seed);

    for (int sweep = 0; sweep < cfg.sweeps; ++sweep) {
        if (cfg.row_order == RowOrder::Randomized) std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i : order) {
            if (norms[i] == 0.0) continue;
            const double factor = cfg.lambda * (b[i] - A.row_dot(i, x)) / norms[i];
            const auto cols = A.row_cols(i);
            const auto weights = A.row_weights(i);
            for (std::size_t k = 0; k < cols.size(); ++k) x[cols[k]] += factor * weights[k];
        }
        if (tracker) out.curve.values.push_back(tracker(out.image));
    }
    return out;
}

ReconResult sirt(const ProjectionOperator& A, std::span<const double> b, const SirtConfig& cfg, const Image& x0,
                 const IterateTracker& tracker) {
    cfg.validate();
    check_dimensions(A, b, x0, "sirt");

    const auto& norms = A.row_norms_sq();
    const auto m = std::count_if(norms.begin(), norms.end(), [](double v) { return v > 0.0; });
    ReconResult out{x0, {{}, "SIRT"}};
    if (m == 0) return out;

    auto& x = out.image.pixels;
    std::vector<double> scaled_residual(A.rows());
    const double relax = cfg.lambda / static_cast<double>(m);
    for (int it = 0; it < cfg.iterations; ++it) {
        for (std::size_t i = 0; i < A.rows(); ++i)
            scaled_residual[i] = norms[i] > 0.0 ? (b[i] - A.row_dot(i, x)) / norms[i] : 0.0;
        const auto update = A.apply_transpose(scaled_residual);
        double norm_sq = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            x[j] += relax * update[j];
            norm_sq += x[j] * x[j];
        }
        if (!(std::sqrt(norm_sq) <= kDivergenceNorm))
            throw DivergenceError("sirt: iterate norm exceeded 1e12 at iteration " + std::to_string(it + 1));
        if (tracker) out.curve.values.push_back(tracker(out.image));
    }
    return out;
}

} // namespace gtvtomo
