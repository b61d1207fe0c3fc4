#include "gtvtomo/noise.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gtvtomo {

Sinogram add_noise(const Sinogram& s, const NoiseSpec& spec) {
    if (!(spec.relative_level >= 0.0) || !std::isfinite(spec.relative_level))
        throw std::invalid_argument("noise level must be a finite nonnegative number");

    double signal_sq = 0.0;
    for (double v : s.values) {
        if (!std::isfinite(v)) throw std::invalid_argument("noise: sinogram contains non-finite values");
        signal_sq += v * v;
    }
    if (spec.relative_level == 0.0 || signal_sq == 0.0) return s;

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> g(s.size());
    double g_sq = 0.0;
    for (auto& v : g) {
        v = normal(rng);
        g_sq += v * v;
    }
    const double scale = spec.relative_level * std::sqrt(signal_sq / g_sq);

    Sinogram out = s;
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] += scale * g[i];
    return out;
}

} // namespace gtvtomo
