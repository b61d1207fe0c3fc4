#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "gtvtomo/image.hpp"
#include "gtvtomo/metrics.hpp"
#include "gtvtomo/projector.hpp"

namespace gtvtomo {

enum class RowOrder { Sequential, Randomized };

struct ArtConfig {
    double lambda = 0.25; ///< relaxation, must lie in (0, 2)
    int sweeps = 10;
    RowOrder row_order = RowOrder::Sequential;
    std::uint64_t seed = 0; ///< used by RowOrder::Randomized

    void validate() const;
};

struct SirtConfig {
    double lambda = 1.0;
    int iterations = 100;

    void validate() const;
};

enum class FbpFilter { RamLak, SheppLogan, Cosine };
enum class Interpolation { Linear, Nearest };

struct FbpConfig {
    FbpFilter filter = FbpFilter::RamLak;
    Interpolation interpolation = Interpolation::Linear;
};

/// Called after every sweep (ART) or iteration (SIRT) with the current
/// iterate; the returned value is appended to the result's error curve.
using IterateTracker = std::function<double(const Image&)>;

struct ReconResult {
    Image image;
    ErrorCurve curve;
};

/**
 * Filtered back-projection. Each detector profile is zero-padded to the next
 * power of two >= 2p and convolved with the band-limited ramp kernel in the
 * frequency domain (optionally apodized), then back-projected with the chosen
 * interpolation and scaled by pi/q.
 */
Image fbp(const Sinogram& s, const Geometry& geometry, const FbpConfig& cfg = {});

/// Kaczmarz: sequential orthogonal projections onto each measurement
/// hyperplane, relaxed by lambda. Rows with zero norm are skipped.
ReconResult art(const ProjectionOperator& A, std::span<const double> b, const ArtConfig& cfg, const Image& x0,
                const IterateTracker& tracker = {});

/// Cimmino: x += lambda/m * sum_i (b_i - <a_i, x>) / ||a_i||^2 * a_i over the m
/// nonzero rows. Throws DivergenceError if ||x|| exceeds 1e12.
ReconResult sirt(const ProjectionOperator& A, std::span<const double> b, const SirtConfig& cfg, const Image& x0,
                 const IterateTracker& tracker = {});

} // namespace gtvtomo
