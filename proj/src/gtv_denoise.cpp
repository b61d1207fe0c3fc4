#include "gtvtomo/gtv_denoise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gtvtomo {

void DenoiseConfig::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and nonnegative");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (max_iters < 1) throw std::invalid_argument("max_iters must be positive");
}

double objective(std::span<const double> b, std::span<const double> z, const PatchGraph& g, double gamma) {
    if (b.size() != z.size() || z.size() != static_cast<std::size_t>(g.node_count()))
        throw std::invalid_argument("objective: vector lengths do not match the graph");
    double data = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) data += (z[i] - b[i]) * (z[i] - b[i]);
    if (gamma == 0.0) return data;
    double tv = 0.0;
    for (double v : g.gradient(z)) tv += std::abs(v);
    return data + gamma * tv;
}

DenoiseResult denoise(std::span<const double> b, const PatchGraph& g, const DenoiseConfig& cfg) {
    cfg.validate();
    if (b.size() != static_cast<std::size_t>(g.node_count()))
        throw std::invalid_argument("denoise: signal length " + std::to_string(b.size()) + " != node count " +
                                    std::to_string(g.node_count()));
    for (double v : b)
        if (!std::isfinite(v)) throw std::invalid_argument("denoise: input contains non-finite values");

    DenoiseResult result;
    if (cfg.gamma == 0.0 || g.edge_count() == 0) {
        result.z.assign(b.begin(), b.end());
        result.trace.objective.push_back(objective(b, result.z, g, cfg.gamma));
        result.trace.iterations_run = 1;
        result.trace.converged = true;
        return result;
    }

    const double step = g.tau() * g.tau();
    const double bound = 0.5 * cfg.gamma;
    std::vector<double> u(g.edge_count(), 0.0);
    std::vector<double> x(b.size());
    auto& trace = result.trace;

    for (int j = 0; j < cfg.max_iters; ++j) {
        const auto div = g.divergence(u);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = b[i] - div[i];

        const auto grad = g.gradient(x);
        for (std::size_t e = 0; e < u.size(); ++e) {
            const double r = step * u[e] + grad[e];
            u[e] = cfg.threshold_mode == ThresholdMode::Symmetric ? std::clamp(r / step, -bound, bound)
                                                                   : std::min(r / step, bound);
        }

        const double f = objective(b, x, g, cfg.gamma);
        trace.objective.push_back(f);
        trace.iterations_run = j + 1;
        if (j > 0) {
            const double prev = trace.objective[trace.objective.size() - 2];
            if (prev == 0.0 || (f - prev) * (f - prev) / (prev * prev) < cfg.epsilon) {
                trace.converged = true;
                break;
            }
        } else if (f == 0.0) {
            trace.converged = true;
            break;
        }
    }
    result.z = std::move(x);
    return result;
}

GammaSweepResult gamma_sweep(std::span<const double> b, const PatchGraph& g, std::span<const double> gammas,
                             const Evaluator& evaluator, const DenoiseConfig& base) {
    if (gammas.empty()) throw std::invalid_argument("gamma_sweep: empty gamma list");
    GammaSweepResult out;
    out.scores.reserve(gammas.size());
    double best_score = INFINITY;
    for (double gamma : gammas) {
        DenoiseConfig cfg = base;
        cfg.gamma = gamma;
        auto res = denoise(b, g, cfg);
        const double score = evaluator(res.z);
        out.scores.push_back(score);
        const bool better = score < best_score || (score == best_score && gamma < out.best_gamma);
        if (out.best_z.empty() || better) {
            best_score = score;
            out.best_gamma = gamma;
            out.best_z = std::move(res.z);
        }
    }
    return out;
}

std::vector<double> default_gamma_grid() {
    std::vector<double> grid{0.0};
    constexpr int points = 21;
    const double lo = std::log10(1e-3);
    const double hi = std::log10(20.0);
    for (int k = 0; k < points; ++k) grid.push_back(std::pow(10.0, lo + (hi - lo) * k / (points - 1)));
    return grid;
}

} // namespace gtvtomo
