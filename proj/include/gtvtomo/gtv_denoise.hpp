#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gtvtomo/patch_graph.hpp"

namespace gtvtomo {

enum class ThresholdMode {
    Symmetric,    ///< dual variable projected onto [-gamma/2, gamma/2]
    PaperLiteral, ///< one-sided threshold max(r - t, 0): only the upper bound is enforced
};

struct DenoiseConfig {
    double gamma = 0.0;
    double epsilon = 1e-6; ///< stop when (F_{j+1} - F_j)^2 / F_j^2 < epsilon
    int max_iters = 500;
    ThresholdMode threshold_mode = ThresholdMode::Symmetric;

    void validate() const;
};

struct DenoiseTrace {
    std::vector<double> objective; ///< F_1, F_2, ... one entry per iteration
    int iterations_run = 0;
    bool converged = false;
};

struct DenoiseResult {
    std::vector<double> z;
    DenoiseTrace trace;
};

/**
 * Graph total-variation denoising,
 *
 *     min_z ||z - b||^2 + gamma * ||grad z||_1,
 *
 * solved by projected gradient ascent on the dual edge variable u:
 *
 *     x_j     = b - div(u_j)
 *     r_j     = L u_j + grad(x_j)          L = tau^2 = ||grad||^2
 *     u_{j+1} = clamp(r_j / L, -gamma/2, gamma/2)
 *
 * F_{j+1} is the objective at x_j. The returned z is the last x_j. gamma = 0
 * returns b unchanged after one iteration.
 *
 * Throws std::invalid_argument on size mismatch or non-finite input.
 */
DenoiseResult denoise(std::span<const double> b, const PatchGraph& g, const DenoiseConfig& cfg);

/// ||z - b||^2 + gamma * sum over stored edges of sqrt(w_ij) |z_j - z_i|.
double objective(std::span<const double> b, std::span<const double> z, const PatchGraph& g, double gamma);

struct GammaSweepResult {
    double best_gamma = 0.0;
    std::vector<double> best_z;
    std::vector<double> scores; ///< same order as the input gammas
};

using Evaluator = std::function<double(std::span<const double>)>;

/// Denoise once per gamma, score each result, keep the lowest score (ties go
/// to the smaller gamma). `base` supplies epsilon, max_iters and threshold mode.
GammaSweepResult gamma_sweep(std::span<const double> b, const PatchGraph& g, std::span<const double> gammas,
                             const Evaluator& evaluator, const DenoiseConfig& base = {});

/// gamma = 0 followed by 21 log-spaced values from 1e-3 to 20.
std::vector<double> default_gamma_grid();

} // namespace gtvtomo
