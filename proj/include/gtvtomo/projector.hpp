#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gtvtomo/image.hpp"

namespace gtvtomo {

/**
 * Parallel-beam acquisition geometry.
 *
 * At angle theta the rays are the lines x*cos(theta) + y*sin(theta) = t, with
 * p offsets t spaced detector_span / p apart and centred on the image. Image
 * coordinates are in pixel units with the origin at the image centre and y
 * pointing up (row 0 is the top row).
 */
struct Geometry {
    int n = 0;
    int p = 0;
    int q = 0;
    std::vector<double> angles_deg;
    double detector_span = 0.0;

    /// q equally spaced angles 180k/q and a detector covering the diagonal.
    static Geometry parallel(int n, int p, int q);

    double detector_spacing() const { return detector_span / p; }
    double ray_offset(int ray) const { return (ray - (p - 1) / 2.0) * detector_spacing(); }
    std::size_t rows() const { return static_cast<std::size_t>(p) * q; }

    /// Throws std::invalid_argument if any invariant is violated.
    void validate() const;
};

/// p x q projection array stored row-major: values[ray * q + angle]. Each
/// column holds one projection, and the flat vector is the measurement b.
struct Sinogram {
    int p = 0;
    int q = 0;
    std::vector<double> values;

    Sinogram() = default;
    Sinogram(int rays, int angles, double fill = 0.0)
        : p(rays), q(angles), values(static_cast<std::size_t>(rays) * angles, fill) {}
    Sinogram(int rays, int angles, std::vector<double> data);

    double& at(int ray, int angle) { return values[static_cast<std::size_t>(ray) * q + angle]; }
    double at(int ray, int angle) const { return values[static_cast<std::size_t>(ray) * q + angle]; }
    std::size_t size() const { return values.size(); }

    friend bool operator==(const Sinogram&, const Sinogram&) = default;
};

struct RayEntry {
    int col;
    double length;
};

/// Exact intersection lengths of one line with the n x n pixel grid, sorted by
/// pixel index. Segments shorter than 1e-12 are dropped, so a line passing
/// through a grid vertex does not pick up spurious cells.
std::vector<RayEntry> trace_ray(int n, double theta_deg, double offset);

/// Sparse system matrix in compressed row layout. Row `ray * q + angle` holds
/// the intersection lengths of that ray with every pixel it crosses. Rays that
/// miss the image are kept as empty rows.
class ProjectionOperator {
public:
    ProjectionOperator(Geometry geometry, std::vector<std::size_t> row_ptr, std::vector<int> cols,
                       std::vector<double> weights);

    std::size_t rows() const { return row_ptr_.size() - 1; }
    std::size_t cols() const { return static_cast<std::size_t>(geometry_.n) * geometry_.n; }
    std::size_t nonzeros() const { return weights_.size(); }
    const Geometry& geometry() const { return geometry_; }

    std::span<const int> row_cols(std::size_t i) const {
        return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    std::span<const double> row_weights(std::size_t i) const {
        return {weights_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
    }
    double row_dot(std::size_t i, std::span<const double> x) const;
    /// ||a_i||^2 for every row.
    const std::vector<double>& row_norms_sq() const { return row_norms_sq_; }

    /// y = A x. Throws std::invalid_argument on size mismatch.
    std::vector<double> apply(std::span<const double> x) const;
    /// x = A^T y. Throws std::invalid_argument on size mismatch.
    std::vector<double> apply_transpose(std::span<const double> y) const;

private:
    Geometry geometry_;
    std::vector<std::size_t> row_ptr_;
    std::vector<int> cols_;
    std::vector<double> weights_;
    std::vector<double> row_norms_sq_;
};

ProjectionOperator build_projector(const Geometry& geometry);

Sinogram forward_project(const ProjectionOperator& A, const Image& x);
Image back_project(const ProjectionOperator& A, const Sinogram& s);

} // namespace gtvtomo
