#ifndef ERLAP_ENSEMBLE_HPP
#define ERLAP_ENSEMBLE_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace erlap {

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Parameters of the sparse Erdos-Renyi ensemble G(N, p/N) together with the
/// seed that keys every realization stream.
struct GraphSpec {
    std::uint64_t n_vertices = 2;
    double edge_prob = 0.5;  // p; the per-pair probability is p / N
    std::uint64_t master_seed = 0;

    double pair_prob() const { return edge_prob / static_cast<double>(n_vertices); }

    // Throws ParameterError unless N >= 2 and 0 < p < N.
    void validate() const;
};

/// Simple undirected graph on vertices 0..n-1. Edges are stored as (i, j)
/// with i < j in lexicographic order, so two graphs are equal iff their
/// vertex counts and edge lists are equal.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::uint64_t n);
    // Canonicalizes the given edges; rejects self-loops, duplicates and
    // out-of-range endpoints.
    Graph(std::uint64_t n, std::vector<Edge> edges);

    std::uint64_t n() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    bool operator==(const Graph&) const = default;

private:
    std::uint64_t n_ = 0;
    std::vector<Edge> edges_;
};

/// 64-bit engine for a single realization. The state is derived from
/// (master_seed, realization) by SplitMix64 finalization of the counter pair,
/// so any realization can be regenerated independently of all others.
class RealizationRng {
public:
    using result_type = std::uint64_t;

    RealizationRng(std::uint64_t master_seed, std::uint64_t realization);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()();

    // Uniform double in (0, 1].
    double uniform_open0();

private:
    std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Samples realization r of the ensemble. Pure function of (spec, r).
/// Uses geometric gap-skipping over the linearized pair index, so the
/// expected cost is O(N + N p).
Graph sample_graph(const GraphSpec& spec, std::uint64_t realization);

std::vector<std::uint32_t> degree_sequence(const Graph& g);

// Edge-list text format: "N M" then M lines "i j" with i < j, 0-based.
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);

}  // namespace erlap

#endif  // ERLAP_ENSEMBLE_HPP
