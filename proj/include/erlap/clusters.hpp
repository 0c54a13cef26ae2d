#ifndef ERLAP_CLUSTERS_HPP
#define ERLAP_CLUSTERS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "erlap/ensemble.hpp"

namespace erlap {

/// Disjoint-set forest with union by size and path halving.
class UnionFind {
public:
    explicit UnionFind(std::size_t n);

    std::uint32_t find(std::uint32_t x);
    // Returns false when x and y were already in the same set.
    bool unite(std::uint32_t x, std::uint32_t y);
    std::uint32_t set_size(std::uint32_t x) { return size_[find(x)]; }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

using LocalEdge = std::pair<std::uint32_t, std::uint32_t>;

struct ClusterFlags {
    bool is_isolated = false;
    bool is_tree = false;          // edge count == size - 1, includes single vertices
    bool is_linear_chain = false;  // tree with size >= 2 and all degrees <= 2
    bool is_cyclic = false;        // edge count >= size

    bool operator==(const ClusterFlags&) const = default;
};

/// A maximal connected subgraph. Vertices are the sorted global labels;
/// edges use local coordinates 0..size-1 with i < j, sorted.
struct Cluster {
    std::vector<Vertex> vertices;
    std::vector<LocalEdge> edges;
    ClusterFlags flags;

    std::size_t size() const { return vertices.size(); }
    std::size_t edge_count() const { return edges.size(); }
    std::vector<std::uint32_t> local_degrees() const;
};

ClusterFlags classify(const Cluster& c);

struct ClusterDecomposition {
    std::vector<std::uint32_t> cluster_id;  // per vertex
    std::vector<Cluster> clusters;          // ordered by smallest member

    std::size_t count() const { return clusters.size(); }
    std::size_t n_vertices() const { return cluster_id.size(); }
};

/// Union-find decomposition into clusters. Isolated vertices become
/// one-vertex clusters; every edge lands in exactly one cluster.
ClusterDecomposition decompose(const Graph& g);

const Cluster& cluster_of_vertex(const ClusterDecomposition& d, Vertex v);

/// Integer census of cluster sizes and classes accumulated over
/// realizations. Per-size vectors are indexed by cluster size (index 0 is
/// unused). The *_sq members hold sums over realizations of the squared
/// per-realization counts, which is all that standard errors need; merging
/// is exact and order-independent.
struct CensusReport {
    std::uint64_t n_vertices = 0;
    double edge_prob = 0.0;
    std::uint64_t realizations = 0;

    std::vector<std::uint64_t> clusters;
    std::vector<std::uint64_t> clusters_sq;
    std::vector<std::uint64_t> trees;
    std::vector<std::uint64_t> trees_sq;
    std::vector<std::uint64_t> linear;
    std::vector<std::uint64_t> linear_sq;

    // Size and linear-chain indicator of the cluster containing vertex 0.
    std::vector<std::uint64_t> vertex0_size;
    std::vector<std::uint64_t> vertex0_linear;

    std::uint64_t total_clusters = 0;
    std::uint64_t total_clusters_sq = 0;
    std::uint64_t vertices_on_trees = 0;

    static CensusReport of_realization(const ClusterDecomposition& d, double edge_prob);

    // Throws ParameterError on mismatched (N, p).
    void merge(const CensusReport& other);

    std::size_t max_size() const { return clusters.empty() ? 0 : clusters.size() - 1; }
    std::uint64_t count_at(const std::vector<std::uint64_t>& v, std::size_t n) const {
        return n < v.size() ? v[n] : 0;
    }

    // Mean number of size-n clusters per vertex, and its standard error
    // across realizations (nullopt when R < 2).
    double tau_hat(std::size_t n) const;
    std::optional<double> tau_stderr(std::size_t n) const;
    double tree_density(std::size_t n) const;
    std::optional<double> tree_density_stderr(std::size_t n) const;
    double linear_density(std::size_t n) const;
    std::optional<double> linear_density_stderr(std::size_t n) const;
    // n * tau_hat(n), the empirical probability that a fixed vertex sits in a
    // size-n cluster.
    double vertex_size_prob(std::size_t n) const;
    double clusters_per_vertex() const;
    std::optional<double> clusters_per_vertex_stderr() const;
    double tree_vertex_fraction() const;
};

CensusReport census(std::span<const ClusterDecomposition> decomps, double edge_prob);

// Standard error of a mean from integer sum and sum of squares over r samples,
// each sample scaled by 1/scale.
std::optional<double> stderr_from_sums(std::uint64_t sum, std::uint64_t sum_sq, std::uint64_t r,
                                       double scale);

}  // namespace erlap

#endif  // ERLAP_CLUSTERS_HPP
