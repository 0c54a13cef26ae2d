#include "erlap/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "erlap/parallel.hpp"

namespace erlap {

IntMatrix laplacian_of_cluster(const Cluster& c) {
    const auto n = static_cast<Eigen::Index>(c.size());
    IntMatrix l = IntMatrix::Zero(n, n);
    for (const auto& [i, j] : c.edges) {
        l(i, i) += 1;
        l(j, j) += 1;
        l(i, j) -= 1;
        l(j, i) -= 1;
    }
    return l;
}

double quadratic_form(const Cluster& c, std::span<const double> phi) {
    if (phi.size() != c.size()) {
        throw ParameterError(fmt::format("quadratic_form: vector has {} entries, cluster has {}",
                                         phi.size(), c.size()));
    }
    CompensatedSum s;
    for (const auto& [i, j] : c.edges) {
        const double d = phi[i] - phi[j];
        s.add(d * d);
    }
    return s.value();
}

ClusterSpectrum eigenvalues_cluster(const Cluster& c, const SpectralOptions& opts) {
    ClusterSpectrum out;
    out.size = c.size();
    if (c.size() == 0) throw ParameterError("eigenvalues_cluster: empty cluster");
    if (c.size() == 1) {
        out.eigenvalues = {0.0};
        return out;
    }
    if (c.size() > opts.size_cap) {
        throw EigensolveError(fmt::format("cluster of size {} exceeds the eigensolver cap {}",
                                          c.size(), opts.size_cap),
                              c);
    }
    const Eigen::MatrixXd l = laplacian_of_cluster(c).cast<double>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw EigensolveError(
            fmt::format("eigensolver did not converge on a cluster of size {}", c.size()), c);
    }
    const auto& ev = solver.eigenvalues();
    out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    out.eigenvalues[0] = 0.0;
    out.e_min = out.eigenvalues[1];
    return out;
}

double path_emin_reference(std::uint64_t n) {
    if (n < 2) throw ParameterError("path_emin_reference: n must be at least 2");
    // 2 (1 - cos x) = 4 sin^2(x / 2), stable for small x
    const double s = std::sin(std::numbers::pi / (2.0 * static_cast<double>(n)));
    return 4.0 * s * s;
}

std::size_t GraphSpectrum::exact_zero_count() const {
    return static_cast<std::size_t>(std::count(eigenvalues.begin(), eigenvalues.end(), 0.0));
}

GraphSpectrum graph_spectrum(const Graph& g, const ClusterDecomposition& d,
                             const SpectralOptions& opts) {
    if (d.n_vertices() != g.n()) {
        throw ParameterError("graph_spectrum: decomposition does not match graph");
    }
    GraphSpectrum s;
    s.kernel_dim = d.count();
    s.eigenvalues.reserve(g.n());
    for (const auto& c : d.clusters) {
        auto cs = eigenvalues_cluster(c, opts);
        s.eigenvalues.insert(s.eigenvalues.end(), cs.eigenvalues.begin(), cs.eigenvalues.end());
    }
    std::sort(s.eigenvalues.begin(), s.eigenvalues.end());
    return s;
}

double spectral_moment(const GraphSpectrum& s, int k) {
    if (k < 0 || k > 12) throw ParameterError(fmt::format("spectral_moment: k = {} outside 0..12", k));
    if (s.eigenvalues.empty()) throw ParameterError("spectral_moment: empty spectrum");
    if (k == 0) return 1.0;
    CompensatedSum sum;
    for (double l : s.eigenvalues) sum.add(std::pow(l, k));
    return sum.value() / static_cast<double>(s.size());
}

double adjacency_trace_power(const Cluster& c, int power) {
    if (power < 0 || power % 2 != 0) {
        throw ParameterError(fmt::format("adjacency_trace_power: power {} must be even", power));
    }
    const std::size_t n = c.size();
    if (power == 0) return static_cast<double>(n);
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (const auto& [i, j] : c.edges) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    // Tr A^{2h} = sum_i |A^h e_i|^2; walk counts stay integral in doubles.
    const int half = power / 2;
    std::vector<double> x(n);
    std::vector<double> y(n);
    double total = 0.0;
    for (std::size_t start = 0; start < n; ++start) {
        std::fill(x.begin(), x.end(), 0.0);
        x[start] = 1.0;
        for (int h = 0; h < half; ++h) {
            for (std::size_t v = 0; v < n; ++v) {
                double acc = 0.0;
                for (auto w : adj[v]) acc += x[w];
                y[v] = acc;
            }
            std::swap(x, y);
        }
        for (double v : x) total += v * v;
    }
    return total;
}

std::vector<double> geometric_grid(double e_min, double e_max, std::size_t points) {
    if (!(e_min > 0.0) || !(e_max > e_min) || points < 2) {
        throw ParameterError(fmt::format(
            "geometric grid needs 0 < emin < emax and at least 2 points, got ({}, {}, {})", e_min,
            e_max, points));
    }
    std::vector<double> grid(points);
    const double ratio = std::log(e_max / e_min) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = e_min * std::exp(ratio * static_cast<double>(i));
    }
    grid.front() = e_min;
    grid.back() = e_max;
    return grid;
}

std::vector<double> linear_grid(double e_min, double e_max, std::size_t points) {
    if (!(e_min > 0.0) || !(e_max > e_min) || points < 2) {
        throw ParameterError(fmt::format(
            "linear grid needs 0 < emin < emax and at least 2 points, got ({}, {}, {})", e_min,
            e_max, points));
    }
    std::vector<double> grid(points);
    const double step = (e_max - e_min) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = e_min + step * static_cast<double>(i);
    grid.back() = e_max;
    return grid;
}

std::vector<double> counting_function(const GraphSpectrum& s, std::span<const double> energies) {
    std::vector<double> out;
    out.reserve(energies.size());
    const double n = static_cast<double>(s.size());
    for (double e : energies) {
        const auto below =
            std::upper_bound(s.eigenvalues.begin(), s.eigenvalues.end(), e) - s.eigenvalues.begin();
        out.push_back(static_cast<double>(below) / n);
    }
    return out;
}

namespace {

void validate_grid(std::span<const double> energies) {
    if (energies.empty()) throw ParameterError("energy grid is empty");
    for (std::size_t i = 0; i < energies.size(); ++i) {
        if (!(energies[i] > 0.0)) throw ParameterError("energy grid must be strictly positive");
        if (i > 0 && !(energies[i] > energies[i - 1])) {
            throw ParameterError("energy grid must be strictly increasing");
        }
    }
}

struct RealizationIds {
    bool ok = false;
    double sigma0 = 0.0;
    std::vector<double> sigma;
    std::uint64_t clusters = 0;
};

}  // namespace

IdsEstimate empirical_ids(const GraphSpec& spec, std::uint64_t realizations,
                          std::span<const double> energies, const RunOptions& opts) {
    spec.validate();
    validate_grid(energies);
    if (realizations < 1) throw ParameterError("empirical_ids: need at least one realization");

    std::vector<RealizationIds> per(realizations);
    for_each_index(realizations, opts.workers, [&](std::uint64_t r) {
        const Graph g = sample_graph(spec, r);
        const ClusterDecomposition d = decompose(g);
        auto& slot = per[r];
        slot.clusters = d.count();
        try {
            const GraphSpectrum s = graph_spectrum(g, d, opts.spectral);
            slot.sigma = counting_function(s, energies);
            slot.sigma0 = static_cast<double>(d.count()) / static_cast<double>(g.n());
            slot.ok = true;
        } catch (const EigensolveError&) {
            slot.ok = false;
        }
    });

    IdsEstimate est;
    est.n_vertices = spec.n_vertices;
    est.edge_prob = spec.edge_prob;
    est.master_seed = spec.master_seed;
    est.energies.assign(energies.begin(), energies.end());

    std::vector<double> sigma0;
    std::vector<std::vector<double>> sigma(energies.size());
    std::vector<std::vector<double>> delta(energies.size());
    for (std::uint64_t r = 0; r < realizations; ++r) {
        const auto& slot = per[r];
        est.clusters_seen += slot.clusters;
        if (!slot.ok) {
            est.flagged.push_back(r);
            continue;
        }
        sigma0.push_back(slot.sigma0);
        for (std::size_t i = 0; i < energies.size(); ++i) {
            sigma[i].push_back(slot.sigma[i]);
            delta[i].push_back(slot.sigma[i] - slot.sigma0);
        }
    }
    est.realizations = sigma0.size();
    est.sigma0_hat = estimate_of(sigma0);
    for (std::size_t i = 0; i < energies.size(); ++i) {
        est.sigma_hat.push_back(estimate_of(sigma[i]));
        est.delta_hat.push_back(estimate_of(delta[i]));
    }
    return est;
}

}  // namespace erlap
