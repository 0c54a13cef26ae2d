#include "erlap/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace erlap {

void GraphSpec::validate() const {
    if (n_vertices < 2) {
        throw ParameterError(fmt::format("N must be at least 2, got {}", n_vertices));
    }
    if (!(edge_prob > 0.0) || !(edge_prob < static_cast<double>(n_vertices))) {
        throw ParameterError(
            fmt::format("p must satisfy 0 < p < N = {}, got {}", n_vertices, edge_prob));
    }
}

Graph::Graph(std::uint64_t n) : n_(n) {}

Graph::Graph(std::uint64_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    for (auto& e : edges_) {
        if (e.first == e.second) {
            throw ParameterError(fmt::format("self-loop at vertex {}", e.first));
        }
        if (e.first > e.second) std::swap(e.first, e.second);
        if (e.second >= n_) {
            throw ParameterError(fmt::format("edge ({}, {}) out of range for n = {}",
                                             e.first, e.second, n_));
        }
    }
    std::sort(edges_.begin(), edges_.end());
    auto dup = std::adjacent_find(edges_.begin(), edges_.end());
    if (dup != edges_.end()) {
        throw ParameterError(fmt::format("duplicate edge ({}, {})", dup->first, dup->second));
    }
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RealizationRng::RealizationRng(std::uint64_t master_seed, std::uint64_t realization) {
    std::uint64_t a = master_seed;
    std::uint64_t b = realization ^ 0x6a09e667f3bcc909ULL;
    std::uint64_t key = splitmix64(a) ^ rotl(splitmix64(b), 17);
    for (auto& word : s_) word = splitmix64(key);
}

RealizationRng::result_type RealizationRng::operator()() {
    // xoshiro256**
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RealizationRng::uniform_open0() {
    return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
}

Graph sample_graph(const GraphSpec& spec, std::uint64_t realization) {
    spec.validate();
    const std::uint64_t n = spec.n_vertices;
    const double q = spec.pair_prob();
    RealizationRng rng(spec.master_seed, realization);

    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(0.6 * static_cast<double>(n) * spec.edge_prob) + 16);

    // Walk the pairs (w, v), w < v, ordered by v then w, jumping over runs of
    // absent pairs. The run length is Geometric(q) on {0, 1, ...}.
    const double log_absent = std::log1p(-q);
    std::uint64_t v = 1;
    std::uint64_t w = 0;
    bool first = true;
    while (v < n) {
        const double skip = std::floor(std::log(rng.uniform_open0()) / log_absent);
        const double limit = static_cast<double>(n) * static_cast<double>(n);
        std::uint64_t step = skip >= limit ? static_cast<std::uint64_t>(limit)
                                           : static_cast<std::uint64_t>(skip);
        // advance from the previous pair by step + 1 positions
        w += first ? step : step + 1;
        first = false;
        while (v < n && w >= v) {
            w -= v;
            ++v;
        }
        if (v < n) edges.emplace_back(static_cast<Vertex>(w), static_cast<Vertex>(v));
    }
    return Graph(n, std::move(edges));
}

std::vector<std::uint32_t> degree_sequence(const Graph& g) {
    std::vector<std::uint32_t> deg(g.n(), 0);
    for (const auto& [i, j] : g.edges()) {
        ++deg[i];
        ++deg[j];
    }
    return deg;
}

void write_edge_list(std::ostream& os, const Graph& g) {
    os << g.n() << ' ' << g.edge_count() << '\n';
    for (const auto& [i, j] : g.edges()) os << i << ' ' << j << '\n';
}

Graph read_edge_list(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ParameterError("edge list: missing header line");
    std::istringstream header(line);
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    if (!(header >> n >> m)) throw ParameterError("edge list: malformed header \"" + line + "\"");
    std::vector<Edge> edges;
    edges.reserve(m);
    for (std::uint64_t k = 0; k < m; ++k) {
        if (!std::getline(is, line)) {
            throw ParameterError(fmt::format("edge list: expected {} edges, found {}", m, k));
        }
        std::istringstream row(line);
        std::uint64_t i = 0;
        std::uint64_t j = 0;
        if (!(row >> i >> j) || i >= j) {
            throw ParameterError("edge list: malformed edge \"" + line + "\"");
        }
        edges.emplace_back(static_cast<Vertex>(i), static_cast<Vertex>(j));
    }
    return Graph(n, std::move(edges));
}

}  // namespace erlap
