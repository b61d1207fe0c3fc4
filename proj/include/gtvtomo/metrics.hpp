#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gtvtomo/image.hpp"

namespace gtvtomo {

/// l2 reconstruction error per iteration.
struct ErrorCurve {
    std::vector<double> values;
    std::string method_label;
};

struct IntensityProfile {
    int row_index = 0;
    std::vector<double> values;
};

/// ||x - x_true||_2 over all pixels.
double l2_error(const Image& x, const Image& x_true);
/// l2_error divided by ||x_true||_2 (returns the plain error when x_true is zero).
double relative_l2_error(const Image& x, const Image& x_true);

/// Row `row` of the image. Throws std::invalid_argument when out of range.
IntensityProfile profile(const Image& x, int row);

struct CurveMinimum {
    int iteration;
    double value;
};

/// Earliest index of the smallest value. Throws on an empty curve.
CurveMinimum min_error(const ErrorCurve& curve);

} // namespace gtvtomo
