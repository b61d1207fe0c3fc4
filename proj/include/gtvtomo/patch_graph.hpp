#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gtvtomo/projector.hpp"

namespace gtvtomo {

enum class SigmaRule {
    AverageKnnDistance, ///< mean Euclidean distance over all directed K-NN pairs
    Fixed,              ///< use PatchConfig::fixed_sigma
};

struct PatchConfig {
    int patch_side = 3; ///< odd window side l
    int k = 10;         ///< neighbours per node
    SigmaRule sigma_rule = SigmaRule::AverageKnnDistance;
    double fixed_sigma = 1.0;

    void validate() const;
};

/// pq vectors of length dim, stored contiguously.
struct PatchSet {
    std::size_t dim = 0;
    std::vector<double> data;

    std::size_t count() const { return dim == 0 ? 0 : data.size() / dim; }
    std::span<const double> patch(std::size_t i) const { return {data.data() + i * dim, dim}; }
};

/// Undirected edge with i < j.
struct Edge {
    int i;
    int j;
    double weight;
};

/**
 * Weighted undirected graph over sinogram pixels.
 *
 * The gradient has one entry per stored edge, sqrt(w_ij) * (z_j - z_i), so
 * its l1 norm counts every unordered pair once. The spectral norm of the
 * gradient is computed at construction; the object is immutable afterwards.
 */
class PatchGraph {
public:
    /// Edges must satisfy 0 <= i < j < node_count with nonnegative weights.
    /// Duplicate pairs are rejected.
    PatchGraph(int node_count, std::vector<Edge> edges, double sigma = 1.0);

    int node_count() const { return node_count_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<double>& degree() const { return degree_; }
    double sigma() const { return sigma_; }
    /// ||grad||_2, largest singular value of the gradient operator.
    double tau() const { return tau_; }

    /// Weight of the pair (i, j) in either order, 0 if not connected.
    double weight(int i, int j) const;

    std::vector<double> gradient(std::span<const double> z) const;
    std::vector<double> divergence(std::span<const double> u) const;

private:
    int node_count_;
    std::vector<Edge> edges_;
    std::vector<double> sqrt_w_;
    std::vector<double> degree_;
    double sigma_;
    double tau_ = 0.0;
};

/// l x l windows centred at every sinogram pixel, row-major within the window,
/// with replicate padding at the borders. Patch index = ray * q + angle.
PatchSet extract_patches(const Sinogram& s, const PatchConfig& cfg);

/**
 * Exact K-nearest-neighbour graph on patch vectors (Euclidean distance, self
 * excluded, ties to the lower index), symmetrized by union, with Gaussian
 * weights exp(-d^2 / sigma^2). If every K-NN distance is zero, sigma falls back
 * to 1.
 */
PatchGraph build_graph(const PatchSet& patches, const PatchConfig& cfg);

std::vector<double> graph_gradient(const PatchGraph& g, std::span<const double> z);
/// Adjoint of graph_gradient.
std::vector<double> graph_divergence(const PatchGraph& g, std::span<const double> u);

/// Power iteration on div(grad(.)); stops when the eigenvalue estimate changes
/// by less than `rel_tol` relative, or after `max_iters` iterations.
double spectral_norm(const PatchGraph& g, double rel_tol = 1e-8, int max_iters = 10000);

} // namespace gtvtomo
