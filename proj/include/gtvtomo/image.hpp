#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gtvtomo {

/// Square grayscale raster, row-major. Row 0 is the top of the image.
struct Image {
    int n = 0;
    std::vector<double> pixels;

    Image() = default;
    explicit Image(int side, double fill = 0.0)
        : n(side), pixels(static_cast<std::size_t>(side) * side, fill) {}

    double& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * n + col]; }
    double at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * n + col]; }

    std::size_t size() const { return pixels.size(); }
    std::span<const double> view() const { return pixels; }

    friend bool operator==(const Image&, const Image&) = default;
};

} // namespace gtvtomo
