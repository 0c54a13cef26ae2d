#include "erlap/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace erlap {

UnionFind::UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
    for (std::size_t i = 0; i < n; ++i) parent_[i] = static_cast<std::uint32_t>(i);
}

std::uint32_t UnionFind::find(std::uint32_t x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

bool UnionFind::unite(std::uint32_t x, std::uint32_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (size_[x] < size_[y]) std::swap(x, y);
    parent_[y] = x;
    size_[x] += size_[y];
    return true;
}

std::vector<std::uint32_t> Cluster::local_degrees() const {
    std::vector<std::uint32_t> deg(vertices.size(), 0);
    for (const auto& [i, j] : edges) {
        ++deg[i];
        ++deg[j];
    }
    return deg;
}

ClusterFlags classify(const Cluster& c) {
    ClusterFlags f;
    const std::size_t n = c.size();
    const std::size_t m = c.edge_count();
    f.is_isolated = n == 1;
    f.is_tree = m + 1 == n;
    f.is_cyclic = m >= n;
    if (f.is_tree && n >= 2) {
        const auto deg = c.local_degrees();
        f.is_linear_chain = std::all_of(deg.begin(), deg.end(), [](auto d) { return d <= 2; });
    }
    return f;
}

ClusterDecomposition decompose(const Graph& g) {
    const std::size_t n = g.n();
    UnionFind uf(n);
    for (const auto& [i, j] : g.edges()) uf.unite(i, j);

    ClusterDecomposition d;
    d.cluster_id.assign(n, 0);
    constexpr auto unset = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> root_to_cluster(n, unset);
    std::vector<std::uint32_t> local_index(n, 0);

    for (std::size_t v = 0; v < n; ++v) {
        const auto root = uf.find(static_cast<std::uint32_t>(v));
        auto& cid = root_to_cluster[root];
        if (cid == unset) {
            cid = static_cast<std::uint32_t>(d.clusters.size());
            d.clusters.emplace_back();
            d.clusters.back().vertices.reserve(uf.set_size(root));
        }
        auto& c = d.clusters[cid];
        local_index[v] = static_cast<std::uint32_t>(c.vertices.size());
        c.vertices.push_back(static_cast<Vertex>(v));
        d.cluster_id[v] = cid;
    }
    // Global edges are sorted and local labels are monotone in global ones,
    // so each cluster's local edge list comes out sorted.
    for (const auto& [i, j] : g.edges()) {
        d.clusters[d.cluster_id[i]].edges.emplace_back(local_index[i], local_index[j]);
    }
    for (auto& c : d.clusters) c.flags = classify(c);
    return d;
}

const Cluster& cluster_of_vertex(const ClusterDecomposition& d, Vertex v) {
    if (v >= d.n_vertices()) {
        throw ParameterError(fmt::format("vertex {} out of range for N = {}", v, d.n_vertices()));
    }
    return d.clusters[d.cluster_id[v]];
}

namespace {

void grow(std::vector<std::uint64_t>& v, std::size_t n) {
    if (v.size() < n) v.resize(n, 0);
}

void add_into(std::vector<std::uint64_t>& dst, const std::vector<std::uint64_t>& src) {
    grow(dst, src.size());
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] += src[k];
}

}  // namespace

CensusReport CensusReport::of_realization(const ClusterDecomposition& d, double edge_prob) {
    CensusReport r;
    r.n_vertices = d.n_vertices();
    r.edge_prob = edge_prob;
    r.realizations = 1;
    std::size_t largest = 0;
    for (const auto& c : d.clusters) largest = std::max(largest, c.size());
    const std::size_t len = largest + 1;
    r.clusters.assign(len, 0);
    r.trees.assign(len, 0);
    r.linear.assign(len, 0);
    r.vertex0_size.assign(len, 0);
    r.vertex0_linear.assign(len, 0);
    for (const auto& c : d.clusters) {
        const auto n = c.size();
        ++r.clusters[n];
        if (c.flags.is_tree) {
            ++r.trees[n];
            r.vertices_on_trees += n;
        }
        if (c.flags.is_linear_chain) ++r.linear[n];
    }
    auto square = [](const std::vector<std::uint64_t>& v) {
        std::vector<std::uint64_t> out(v.size());
        for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k] * v[k];
        return out;
    };
    r.clusters_sq = square(r.clusters);
    r.trees_sq = square(r.trees);
    r.linear_sq = square(r.linear);
    r.total_clusters = d.count();
    r.total_clusters_sq = r.total_clusters * r.total_clusters;
    if (r.n_vertices > 0) {
        const auto& c0 = cluster_of_vertex(d, 0);
        ++r.vertex0_size[c0.size()];
        if (c0.flags.is_linear_chain) ++r.vertex0_linear[c0.size()];
    }
    return r;
}

void CensusReport::merge(const CensusReport& other) {
    if (other.realizations == 0) return;
    if (realizations == 0) {
        *this = other;
        return;
    }
    if (other.n_vertices != n_vertices || other.edge_prob != edge_prob) {
        throw ParameterError(fmt::format("census merge: (N, p) = ({}, {}) vs ({}, {})",
                                         n_vertices, edge_prob, other.n_vertices,
                                         other.edge_prob));
    }
    realizations += other.realizations;
    add_into(clusters, other.clusters);
    add_into(clusters_sq, other.clusters_sq);
    add_into(trees, other.trees);
    add_into(trees_sq, other.trees_sq);
    add_into(linear, other.linear);
    add_into(linear_sq, other.linear_sq);
    add_into(vertex0_size, other.vertex0_size);
    add_into(vertex0_linear, other.vertex0_linear);
    total_clusters += other.total_clusters;
    total_clusters_sq += other.total_clusters_sq;
    vertices_on_trees += other.vertices_on_trees;
}

std::optional<double> stderr_from_sums(std::uint64_t sum, std::uint64_t sum_sq, std::uint64_t r,
                                       double scale) {
    if (r < 2) return std::nullopt;
    const double rd = static_cast<double>(r);
    const long double s = static_cast<long double>(sum);
    long double centered = static_cast<long double>(sum_sq) - s * s / rd;
    if (centered < 0.0L) centered = 0.0L;
    const double var = static_cast<double>(centered) / (rd - 1.0);
    return std::sqrt(var / rd) / scale;
}

double CensusReport::tau_hat(std::size_t n) const {
    return static_cast<double>(count_at(clusters, n)) /
           (static_cast<double>(realizations) * static_cast<double>(n_vertices));
}

std::optional<double> CensusReport::tau_stderr(std::size_t n) const {
    return stderr_from_sums(count_at(clusters, n), count_at(clusters_sq, n), realizations,
                            static_cast<double>(n_vertices));
}

double CensusReport::tree_density(std::size_t n) const {
    return static_cast<double>(count_at(trees, n)) /
           (static_cast<double>(realizations) * static_cast<double>(n_vertices));
}

std::optional<double> CensusReport::tree_density_stderr(std::size_t n) const {
    return stderr_from_sums(count_at(trees, n), count_at(trees_sq, n), realizations,
                            static_cast<double>(n_vertices));
}

double CensusReport::linear_density(std::size_t n) const {
    return static_cast<double>(count_at(linear, n)) /
           (static_cast<double>(realizations) * static_cast<double>(n_vertices));
}

std::optional<double> CensusReport::linear_density_stderr(std::size_t n) const {
    return stderr_from_sums(count_at(linear, n), count_at(linear_sq, n), realizations,
                            static_cast<double>(n_vertices));
}

double CensusReport::vertex_size_prob(std::size_t n) const {
    return static_cast<double>(n) * tau_hat(n);
}

double CensusReport::clusters_per_vertex() const {
    return static_cast<double>(total_clusters) /
           (static_cast<double>(realizations) * static_cast<double>(n_vertices));
}

std::optional<double> CensusReport::clusters_per_vertex_stderr() const {
    return stderr_from_sums(total_clusters, total_clusters_sq, realizations,
                            static_cast<double>(n_vertices));
}

double CensusReport::tree_vertex_fraction() const {
    return static_cast<double>(vertices_on_trees) /
           (static_cast<double>(realizations) * static_cast<double>(n_vertices));
}

CensusReport census(std::span<const ClusterDecomposition> decomps, double edge_prob) {
    CensusReport total;
    for (const auto& d : decomps) total.merge(CensusReport::of_realization(d, edge_prob));
    return total;
}

}  // namespace erlap
