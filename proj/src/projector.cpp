#include "gtvtomo/projector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gtvtomo {

namespace {

constexpr double kMinSegment = 1e-12;

// cos/sin of an angle in degrees, exact at multiples of 90.
std::pair<double, double> cos_sin_deg(double deg) {
    const double wrapped = std::fmod(std::fmod(deg, 360.0) + 360.0, 360.0);
    if (wrapped == 0.0) return {1.0, 0.0};
    if (wrapped == 90.0) return {0.0, 1.0};
    if (wrapped == 180.0) return {-1.0, 0.0};
    if (wrapped == 270.0) return {0.0, -1.0};
    const double rad = deg * std::numbers::pi / 180.0;
    return {std::cos(rad), std::sin(rad)};
}

// Parameter interval [lo, hi) along one axis for which origin + s*dir lies in
// [-half, half]. Returns false if the line never enters the slab.
bool slab_interval(double origin, double dir, double half, double& lo, double& hi) {
    if (dir == 0.0) {
        if (origin < -half || origin >= half) return false;
        lo = -INFINITY;
        hi = INFINITY;
        return true;
    }
    const double a = (-half - origin) / dir;
    const double b = (half - origin) / dir;
    lo = std::min(a, b);
    hi = std::max(a, b);
    return true;
}

} // namespace

Geometry Geometry::parallel(int n, int p, int q) {
    Geometry g;
    g.n = n;
    g.p = p;
    g.q = q;
    g.detector_span = n * std::numbers::sqrt2;
    g.angles_deg.resize(q > 0 ? q : 0);
    for (int k = 0; k < q; ++k) g.angles_deg[k] = 180.0 * k / q;
    return g;
}

void Geometry::validate() const {
    if (n < 1) throw std::invalid_argument("geometry: image side must be positive");
    if (p < 1 || q < 1) throw std::invalid_argument("geometry: need at least one ray and one angle");
    if (static_cast<int>(angles_deg.size()) != q)
        throw std::invalid_argument("geometry: expected " + std::to_string(q) + " angles");
    for (int k = 0; k < q; ++k) {
        if (angles_deg[k] < 0.0 || angles_deg[k] >= 180.0)
            throw std::invalid_argument("geometry: angles must lie in [0, 180)");
        if (k > 0 && angles_deg[k] <= angles_deg[k - 1])
            throw std::invalid_argument("geometry: angles must be strictly increasing");
    }
    if (!(detector_span >= n)) throw std::invalid_argument("geometry: detector span must be at least n");
}

Sinogram::Sinogram(int rays, int angles, std::vector<double> data) : p(rays), q(angles), values(std::move(data)) {
    if (values.size() != static_cast<std::size_t>(p) * q)
        throw std::invalid_argument("sinogram: value count does not match p*q");
}

std::vector<RayEntry> trace_ray(int n, double theta_deg, double offset) {
    const auto [c, s] = cos_sin_deg(theta_deg);
    const double half = n / 2.0;
    // Foot point and direction of the line x*c + y*s = offset.
    const double ox = offset * c;
    const double oy = offset * s;
    const double dx = -s;
    const double dy = c;

    double xlo, xhi, ylo, yhi;
    if (!slab_interval(ox, dx, half, xlo, xhi) || !slab_interval(oy, dy, half, ylo, yhi)) return {};
    const double enter = std::max(xlo, ylo);
    const double leave = std::min(xhi, yhi);
    if (!(leave - enter > kMinSegment)) return {};

    std::vector<double> crossings{enter, leave};
    crossings.reserve(2 * n + 4);
    auto add_plane_crossings = [&](double origin, double dir) {
        if (dir == 0.0) return;
        for (int k = 0; k <= n; ++k) {
            const double t = (k - half - origin) / dir;
            if (t > enter && t < leave) crossings.push_back(t);
        }
    };
    add_plane_crossings(ox, dx);
    add_plane_crossings(oy, dy);
    std::sort(crossings.begin(), crossings.end());

    std::vector<RayEntry> entries;
    for (std::size_t k = 0; k + 1 < crossings.size(); ++k) {
        const double len = crossings[k + 1] - crossings[k];
        if (len <= kMinSegment) continue;
        const double mid = 0.5 * (crossings[k] + crossings[k + 1]);
        const int col = std::clamp(static_cast<int>(std::floor(ox + mid * dx + half)), 0, n - 1);
        const int row = n - 1 - std::clamp(static_cast<int>(std::floor(oy + mid * dy + half)), 0, n - 1);
        entries.push_back({row * n + col, len});
    }
    std::sort(entries.begin(), entries.end(), [](const RayEntry& a, const RayEntry& b) { return a.col < b.col; });
    // Merge duplicates produced by rounding at cell corners.
    std::vector<RayEntry> merged;
    for (const auto& e : entries) {
        if (!merged.empty() && merged.back().col == e.col)
            merged.back().length += e.length;
        else
            merged.push_back(e);
    }
    return merged;
}

ProjectionOperator::ProjectionOperator(Geometry geometry, std::vector<std::size_t> row_ptr, std::vector<int> cols,
                                       std::vector<double> weights)
    : geometry_(std::move(geometry)), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)),
      weights_(std::move(weights)) {
    if (row_ptr_.empty() || row_ptr_.back() != cols_.size() || cols_.size() != weights_.size())
        throw std::invalid_argument("projection operator: inconsistent compressed row arrays");
    row_norms_sq_.assign(rows(), 0.0);
    for (std::size_t i = 0; i < rows(); ++i)
        for (double w : row_weights(i)) row_norms_sq_[i] += w * w;
}

double ProjectionOperator::row_dot(std::size_t i, std::span<const double> x) const {
    double acc = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) acc += weights_[k] * x[cols_[k]];
    return acc;
}

std::vector<double> ProjectionOperator::apply(std::span<const double> x) const {
    if (x.size() != cols())
        throw std::invalid_argument("forward projection: image has " + std::to_string(x.size()) +
                                    " pixels, operator expects " + std::to_string(cols()));
    std::vector<double> y(rows());
    for (std::size_t i = 0; i < rows(); ++i) y[i] = row_dot(i, x);
    return y;
}

std::vector<double> ProjectionOperator::apply_transpose(std::span<const double> y) const {
    if (y.size() != rows())
        throw std::invalid_argument("back projection: sinogram has " + std::to_string(y.size()) +
                                    " values, operator expects " + std::to_string(rows()));
    std::vector<double> x(cols(), 0.0);
    for (std::size_t i = 0; i < rows(); ++i) {
        if (y[i] == 0.0) continue;
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) x[cols_[k]] += weights_[k] * y[i];
    }
    return x;
}

ProjectionOperator build_projector(const Geometry& geometry) {
    geometry.validate();
    std::vector<std::size_t> row_ptr{0};
    std::vector<int> cols;
    std::vector<double> weights;
    row_ptr.reserve(geometry.rows() + 1);
    for (int ray = 0; ray < geometry.p; ++ray) {
        const double t = geometry.ray_offset(ray);
        for (int k = 0; k < geometry.q; ++k) {
            for (const auto& e : trace_ray(geometry.n, geometry.angles_deg[k], t)) {
                cols.push_back(e.col);
                weights.push_back(e.length);
            }
            row_ptr.push_back(cols.size());
        }
    }
    return ProjectionOperator(geometry, std::move(row_ptr), std::move(cols), std::move(weights));
}

Sinogram forward_project(const ProjectionOperator& A, const Image& x) {
    const auto& g = A.geometry();
    return Sinogram(g.p, g.q, A.apply(x.pixels));
}

Image back_project(const ProjectionOperator& A, const Sinogram& s) {
    if (static_cast<std::size_t>(s.p) * s.q != A.rows())
        throw std::invalid_argument("back projection: sinogram shape does not match operator");
    Image img;
    img.n = A.geometry().n;
    img.pixels = A.apply_transpose(s.values);
    return img;
}

} // namespace gtvtomo
