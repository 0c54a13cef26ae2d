#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "erlap/analytics.hpp"
#include "erlap/clusters.hpp"

using namespace erlap;

namespace {

Cluster make_cluster(std::uint32_t n, std::vector<LocalEdge> edges) {
    Cluster c;
    c.vertices.resize(n);
    std::iota(c.vertices.begin(), c.vertices.end(), 0u);
    c.edges = std::move(edges);
    c.flags = classify(c);
    return c;
}

// Breadth-first reachability, independent of union-find.
std::vector<std::uint32_t> bfs_components(const Graph& g) {
    std::vector<std::vector<std::uint32_t>> adj(g.n());
    for (const auto& [i, j] : g.edges()) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    std::vector<std::uint32_t> label(g.n(), ~0u);
    std::uint32_t next = 0;
    for (std::uint32_t s = 0; s < g.n(); ++s) {
        if (label[s] != ~0u) continue;
        std::vector<std::uint32_t> queue{s};
        label[s] = next;
        for (std::size_t h = 0; h < queue.size(); ++h) {
            for (auto w : adj[queue[h]]) {
                if (label[w] == ~0u) {
                    label[w] = next;
                    queue.push_back(w);
                }
            }
        }
        ++next;
    }
    return label;
}

}  // namespace

TEST_CASE("union-find") {
    UnionFind uf(6);
    CHECK(uf.unite(0, 1));
    CHECK(uf.unite(2, 1));
    CHECK_FALSE(uf.unite(0, 2));
    CHECK(uf.find(0) == uf.find(2));
    CHECK(uf.find(3) != uf.find(0));
    CHECK(uf.set_size(1) == 3);
}

TEST_CASE("decompose by hand") {
    const auto empty = decompose(Graph(5));
    CHECK(empty.count() == 5);
    for (const auto& c : empty.clusters) {
        CHECK(c.size() == 1);
        CHECK(c.flags.is_isolated);
    }

    const auto d = decompose(Graph(6, {{0, 1}, {1, 2}, {3, 4}}));
    REQUIRE(d.count() == 3);
    CHECK(d.clusters[0].vertices == std::vector<Vertex>{0, 1, 2});
    CHECK(d.clusters[1].vertices == std::vector<Vertex>{3, 4});
    CHECK(d.clusters[2].vertices == std::vector<Vertex>{5});
    CHECK(d.clusters[0].edges == std::vector<LocalEdge>{{0, 1}, {1, 2}});
    CHECK(d.clusters[1].edges == std::vector<LocalEdge>{{0, 1}});
}

TEST_CASE("classification") {
    const auto path = classify(make_cluster(3, {{0, 1}, {1, 2}}));
    CHECK(path.is_tree);
    CHECK(path.is_linear_chain);
    CHECK_FALSE(path.is_cyclic);

    const auto triangle = classify(make_cluster(3, {{0, 1}, {0, 2}, {1, 2}}));
    CHECK(triangle.is_cyclic);
    CHECK_FALSE(triangle.is_tree);
    CHECK_FALSE(triangle.is_linear_chain);

    const auto star = classify(make_cluster(4, {{0, 1}, {0, 2}, {0, 3}}));
    CHECK(star.is_tree);
    CHECK_FALSE(star.is_linear_chain);

    const auto pair = classify(make_cluster(2, {{0, 1}}));
    CHECK(pair.is_tree);
    CHECK(pair.is_linear_chain);

    const auto single = classify(make_cluster(1, {}));
    CHECK(single.is_isolated);
    CHECK_FALSE(single.is_linear_chain);
}

TEST_CASE("cluster_of_vertex") {
    const auto d = decompose(Graph(3, {{0, 1}}));
    CHECK(cluster_of_vertex(d, 0).vertices == std::vector<Vertex>{0, 1});
    CHECK(cluster_of_vertex(d, 1).vertices == std::vector<Vertex>{0, 1});
    const auto e = decompose(Graph(5));
    CHECK(cluster_of_vertex(e, 3).vertices == std::vector<Vertex>{3});
    CHECK_THROWS_AS(cluster_of_vertex(e, 5), ParameterError);
}

TEST_CASE("decomposition properties on random graphs") {
    for (double p : {0.3, 0.9, 1.5, 3.0}) {
        for (std::uint64_t r = 0; r < 20; ++r) {
            const auto g = sample_graph({400, p, 11}, r);
            const auto d = decompose(g);
            const auto bfs = bfs_components(g);
            std::size_t total = 0;
            std::size_t edges = 0;
            for (const auto& c : d.clusters) {
                total += c.size();
                edges += c.edge_count();
                CHECK(std::is_sorted(c.vertices.begin(), c.vertices.end()));
                const auto& f = c.flags;
                const int classes = int(f.is_isolated) + int(f.is_tree && c.size() >= 2) + int(f.is_cyclic);
                CHECK(classes == 1);
                if (f.is_linear_chain) {
                    CHECK(f.is_tree);
                    auto deg = c.local_degrees();
                    std::sort(deg.begin(), deg.end());
                    std::vector<std::uint32_t> profile(c.size(), 2);
                    profile[0] = profile[1] = 1;
                    CHECK(deg == profile);
                }
            }
            CHECK(total == g.n());
            CHECK(edges == g.edge_count());
            // same partition as breadth-first search
            for (const auto& [i, j] : g.edges()) CHECK(d.cluster_id[i] == d.cluster_id[j]);
            for (std::uint32_t u = 0; u < g.n(); u += 7) {
                for (std::uint32_t v = u + 1; v < g.n(); v += 13) {
                    CHECK((d.cluster_id[u] == d.cluster_id[v]) == (bfs[u] == bfs[v]));
                }
            }
        }
    }
}

TEST_CASE("census by hand") {
    const auto d = decompose(Graph(3, {{0, 1}}));
    const auto c = CensusReport::of_realization(d, 0.5);
    CHECK(c.total_clusters == 2);
    CHECK(c.count_at(c.clusters, 1) == 1);
    CHECK(c.count_at(c.clusters, 2) == 1);
    CHECK(c.count_at(c.linear, 2) == 1);
    CHECK(c.vertices_on_trees == 3);
    CHECK_FALSE(c.tau_stderr(1).has_value());

    CensusReport other = CensusReport::of_realization(decompose(Graph(4)), 0.5);
    CHECK_THROWS_AS(CensusReport(c).merge(other), ParameterError);
}

TEST_CASE("census integer identities and merge order") {
    const GraphSpec spec{1000, 0.7, 5};
    std::vector<ClusterDecomposition> decomps;
    for (std::uint64_t r = 0; r < 30; ++r) decomps.push_back(decompose(sample_graph(spec, r)));
    const auto forward = census(decomps, spec.edge_prob);
    std::reverse(decomps.begin(), decomps.end());
    const auto backward = census(decomps, spec.edge_prob);
    CHECK(forward.clusters == backward.clusters);
    CHECK(forward.clusters_sq == backward.clusters_sq);
    CHECK(forward.vertex0_size != std::vector<std::uint64_t>{});

    std::uint64_t weighted = 0;
    for (std::size_t n = 1; n <= forward.max_size(); ++n) {
        weighted += n * forward.clusters[n];
        CHECK(forward.count_at(forward.linear, n) <= forward.count_at(forward.trees, n));
        CHECK(forward.count_at(forward.trees, n) <= forward.clusters[n]);
        // R N tau_hat_n n equals the number of vertices in size-n clusters
        std::uint64_t vertices_in_size_n = 0;
        for (const auto& d : decomps) {
            for (const auto& c : d.clusters) {
                if (c.size() == n) vertices_in_size_n += n;
            }
        }
        CHECK(std::llround(forward.tau_hat(n) * 30.0 * 1000.0 * static_cast<double>(n)) ==
              static_cast<long long>(vertices_in_size_n));
    }
    CHECK(weighted == 30 * 1000);
}

TEST_CASE("census statistics against the cluster-size distribution") {
    const GraphSpec spec{10000, 0.5, 2718};
    CensusReport report;
    for (std::uint64_t r = 0; r < 100; ++r) {
        report.merge(CensusReport::of_realization(decompose(sample_graph(spec, r)), spec.edge_prob));
    }
    double expected_k = 0.0;
    for (std::uint64_t n = 1; n <= 400; ++n) expected_k += tau_n(0.5, n);
    CHECK(std::abs(report.clusters_per_vertex() - expected_k) < 3 * *report.clusters_per_vertex_stderr());
    CHECK(std::abs(report.tau_hat(1) - std::exp(-0.5)) < 3 * *report.tau_stderr(1));
    CHECK(std::abs(report.tau_hat(2) - 0.5 * 0.5 * std::exp(-1.0)) < 3 * *report.tau_stderr(2));
    CHECK(report.tree_vertex_fraction() > 0.99);
}

TEST_CASE("vertex 0 linear chain frequency") {
    const GraphSpec spec{200, 0.5, 99};
    const std::uint64_t reps = 100000;
    std::uint64_t hits = 0;
    for (std::uint64_t r = 0; r < reps; ++r) {
        const auto d = decompose(sample_graph(spec, r));
        const auto& c = cluster_of_vertex(d, 0);
        if (c.flags.is_linear_chain && c.size() == 3) ++hits;
    }
    const double freq = static_cast<double>(hits) / reps;
    const double expected = linear_prob_finite(200, 0.5, 3);
    const double se = std::sqrt(freq * (1 - freq) / reps);
    CHECK(std::abs(freq - expected) < 3 * se);
}

TEST_CASE("exhaustive enumeration at N = 5") {
    // Exact probabilities by summing over all 2^10 graphs on 5 labeled
    // vertices. Tree density matches the finite-N tree formula exactly; the
    // linear-chain closed form omits (m-1)(m-2)/2 absent chord factors.
    const std::uint32_t n = 5;
    const double p = 1.5;
    const double q = p / n;
    std::vector<Edge> pairs;
    for (Vertex i = 0; i < n; ++i)
        for (Vertex j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    std::map<std::size_t, double> tree_density;
    std::map<std::size_t, double> chain_at_0;
    for (unsigned mask = 0; mask < (1u << pairs.size()); ++mask) {
        std::vector<Edge> edges;
        for (unsigned b = 0; b < pairs.size(); ++b)
            if (mask & (1u << b)) edges.push_back(pairs[b]);
        const double prob = std::pow(q, edges.size()) * std::pow(1 - q, pairs.size() - edges.size());
        const auto d = decompose(Graph(n, edges));
        for (const auto& c : d.clusters) {
            if (c.flags.is_tree) tree_density[c.size()] += prob / n;
        }
        const auto& c0 = cluster_of_vertex(d, 0);
        if (c0.flags.is_linear_chain) chain_at_0[c0.size()] += prob;
    }
    for (std::size_t size = 1; size <= n; ++size) {
        CHECK(tree_density[size] == doctest::Approx(tree_prob_finite(n, p, size)).epsilon(1e-12));
    }
    for (std::size_t m = 2; m <= n; ++m) {
        const double chords = static_cast<double>((m - 1) * (m - 2) / 2);
        CHECK(chain_at_0[m] ==
              doctest::Approx(linear_prob_finite(n, p, m) / std::pow(1 - q, chords)).epsilon(1e-12));
    }
}
