#include "gtvtomo/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gtvtomo {

double l2_error(const Image& x, const Image& x_true) {
    if (x.n != x_true.n || x.size() != x_true.size())
        throw std::invalid_argument("l2_error: images have different sizes");
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x.pixels[i] - x_true.pixels[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

double relative_l2_error(const Image& x, const Image& x_true) {
    const double err = l2_error(x, x_true);
    double ref = 0.0;
    for (double v : x_true.pixels) ref += v * v;
    return ref > 0.0 ? err / std::sqrt(ref) : err;
}

IntensityProfile profile(const Image& x, int row) {
    if (row < 0 || row >= x.n)
        throw std::invalid_argument("profile: row " + std::to_string(row) + " outside [0, " + std::to_string(x.n) + ")");
    IntensityProfile p;
    p.row_index = row;
    const auto first = x.pixels.begin() + static_cast<std::ptrdiff_t>(row) * x.n;
    p.values.assign(first, first + x.n);
    return p;
}

CurveMinimum min_error(const ErrorCurve& curve) {
    if (curve.values.empty()) throw std::invalid_argument("min_error: empty curve");
    CurveMinimum best{0, curve.values[0]};
    for (std::size_t k = 1; k < curve.values.size(); ++k)
        if (curve.values[k] < best.value) best = {static_cast<int>(k), curve.values[k]};
    return best;
}

} // namespace gtvtomo
