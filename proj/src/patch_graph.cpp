#include "gtvtomo/patch_graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

namespace gtvtomo {

void PatchConfig::validate() const {
    if (patch_side < 1 || patch_side % 2 == 0) throw std::invalid_argument("patch side must be a positive odd integer");
    if (k < 1) throw std::invalid_argument("K must be at least 1");
    if (sigma_rule == SigmaRule::Fixed && !(fixed_sigma > 0.0))
        throw std::invalid_argument("fixed sigma must be positive");
}

PatchGraph::PatchGraph(int node_count, std::vector<Edge> edges, double sigma)
    : node_count_(node_count), edges_(std::move(edges)), degree_(node_count, 0.0), sigma_(sigma) {
    if (node_count_ < 0) throw std::invalid_argument("graph: negative node count");
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return std::pair(a.i, a.j) < std::pair(b.i, b.j);
    });
    sqrt_w_.reserve(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& [i, j, w] = edges_[e];
        if (i < 0 || j >= node_count_ || i >= j) throw std::invalid_argument("graph: edges must satisfy 0 <= i < j < N");
        if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("graph: weights must be finite and nonnegative");
        if (e > 0 && edges_[e - 1].i == i && edges_[e - 1].j == j) throw std::invalid_argument("graph: duplicate edge");
        sqrt_w_.push_back(std::sqrt(w));
        degree_[i] += w;
        degree_[j] += w;
    }
    if (!edges_.empty()) tau_ = spectral_norm(*this);
}

double PatchGraph::weight(int i, int j) const {
    if (i > j) std::swap(i, j);
    const auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair(i, j), [](const Edge& e, const auto& key) {
        return std::pair(e.i, e.j) < key;
    });
    return it != edges_.end() && it->i == i && it->j == j ? it->weight : 0.0;
}

std::vector<double> PatchGraph::gradient(std::span<const double> z) const {
    if (z.size() != static_cast<std::size_t>(node_count_))
        throw std::invalid_argument("graph gradient: signal length " + std::to_string(z.size()) + " != node count " +
                                    std::to_string(node_count_));
    std::vector<double> out(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) out[e] = sqrt_w_[e] * (z[edges_[e].j] - z[edges_[e].i]);
    return out;
}

std::vector<double> PatchGraph::divergence(std::span<const double> u) const {
    if (u.size() != edges_.size())
        throw std::invalid_argument("graph divergence: edge signal length " + std::to_string(u.size()) +
                                    " != edge count " + std::to_string(edges_.size()));
    std::vector<double> out(node_count_, 0.0);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const double flow = sqrt_w_[e] * u[e];
        out[edges_[e].i] -= flow;
        out[edges_[e].j] += flow;
    }
    return out;
}

PatchSet extract_patches(const Sinogram& s, const PatchConfig& cfg) {
    cfg.validate();
    if (cfg.patch_side > 2 * std::min(s.p, s.q) - 1) throw std::invalid_argument("patch does not fit the sinogram");
    const int half = cfg.patch_side / 2;
    PatchSet set;
    set.dim = static_cast<std::size_t>(cfg.patch_side) * cfg.patch_side;
    set.data.reserve(s.size() * set.dim);
    for (int r = 0; r < s.p; ++r)
        for (int c = 0; c < s.q; ++c)
            for (int dr = -half; dr <= half; ++dr)
                for (int dc = -half; dc <= half; ++dc)
                    set.data.push_back(s.at(std::clamp(r + dr, 0, s.p - 1), std::clamp(c + dc, 0, s.q - 1)));
    return set;
}

PatchGraph build_graph(const PatchSet& patches, const PatchConfig& cfg) {
    cfg.validate();
    const std::size_t count = patches.count();
    const auto k = static_cast<std::size_t>(cfg.k);
    if (count < k + 1)
        throw std::invalid_argument("build_graph: need at least K+1 = " + std::to_string(k + 1) + " patches, got " +
                                    std::to_string(count));

    auto dist_sq = [&](std::size_t a, std::size_t b) {
        const auto pa = patches.patch(a);
        const auto pb = patches.patch(b);
        double acc = 0.0;
        for (std::size_t d = 0; d < patches.dim; ++d) {
            const double diff = pa[d] - pb[d];
            acc += diff * diff;
        }
        return acc;
    };

    // Directed K-NN lists as (squared distance, i, j) with i < j after swap.
    struct Pair {
        double d2;
        int i;
        int j;
    };
    std::vector<Pair> directed;
    directed.reserve(count * k);
    std::vector<std::pair<double, int>> candidates(count - 1);
    double dist_sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t m = 0;
        for (std::size_t j = 0; j < count; ++j)
            if (j != i) candidates[m++] = {dist_sq(i, j), static_cast<int>(j)};
        std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end());
        for (std::size_t n = 0; n < k; ++n) {
            const auto [d2, j] = candidates[n];
            dist_sum += std::sqrt(d2);
            directed.push_back({d2, std::min(static_cast<int>(i), j), std::max(static_cast<int>(i), j)});
        }
    }

    double sigma = cfg.fixed_sigma;
    if (cfg.sigma_rule == SigmaRule::AverageKnnDistance) {
        sigma = dist_sum / static_cast<double>(directed.size());
        if (sigma == 0.0) sigma = 1.0;
    }

    std::sort(directed.begin(), directed.end(),
              [](const Pair& a, const Pair& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
    std::vector<Edge> edges;
    edges.reserve(directed.size());
    for (const auto& pr : directed) {
        if (!edges.empty() && edges.back().i == pr.i && edges.back().j == pr.j) continue;
        edges.push_back({pr.i, pr.j, std::exp(-pr.d2 / (sigma * sigma))});
    }
    return PatchGraph(static_cast<int>(count), std::move(edges), sigma);
}

std::vector<double> graph_gradient(const PatchGraph& g, std::span<const double> z) { return g.gradient(z); }

std::vector<double> graph_divergence(const PatchGraph& g, std::span<const double> u) { return g.divergence(u); }

double spectral_norm(const PatchGraph& g, double rel_tol, int max_iters) {
    if (g.edge_count() == 0) throw std::invalid_argument("spectral_norm: graph has no edges");
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> v(g.node_count());
    for (auto& x : v) x = uni(rng);

    auto normalize = [](std::vector<double>& x) {
        double nrm = 0.0;
        for (double a : x) nrm += a * a;
        nrm = std::sqrt(nrm);
        for (double& a : x) a /= nrm;
    };
    normalize(v);

    double rayleigh = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        const auto grad = g.gradient(v);
        double next = 0.0;
        for (double a : grad) next += a * a;
        v = g.divergence(grad);
        if (next == 0.0) break;
        normalize(v);
        const bool done = it > 0 && std::abs(next - rayleigh) <= rel_tol * next;
        rayleigh = next;
        if (done) break;
    }
    return std::sqrt(rayleigh);
}

} // namespace gtvtomo
