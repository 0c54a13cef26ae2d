#ifndef ERLAP_SPECTRAL_HPP
#define ERLAP_SPECTRAL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "erlap/clusters.hpp"
#include "erlap/ensemble.hpp"
#include "erlap/stats.hpp"

namespace erlap {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Raised when a cluster cannot be diagonalized: either it exceeds the size
/// cap or the dense solver did not converge. Carries the offending cluster.
class EigensolveError : public std::runtime_error {
public:
    EigensolveError(const std::string& what, Cluster cluster)
        : std::runtime_error(what), cluster_(std::move(cluster)) {}
    const Cluster& cluster() const { return cluster_; }

private:
    Cluster cluster_;
};

struct SpectralOptions {
    std::size_t size_cap = 2000;
};

// L = D - A in the cluster's local coordinates.
IntMatrix laplacian_of_cluster(const Cluster& c);

// sum over edges of (phi_i - phi_j)^2; throws ParameterError on size mismatch.
double quadratic_form(const Cluster& c, std::span<const double> phi);

struct ClusterSpectrum {
    std::size_t size = 0;
    std::vector<double> eigenvalues;  // ascending, eigenvalues[0] == 0 exactly
    std::optional<double> e_min;      // smallest nonzero eigenvalue, size >= 2
};

/// Dense symmetric eigensolve of a connected cluster's Laplacian. The kernel
/// of a connected graph is one-dimensional, so the lowest computed value is
/// replaced by an exact 0 rather than thresholded.
ClusterSpectrum eigenvalues_cluster(const Cluster& c, const SpectralOptions& opts = {});

// 2 (1 - cos(pi / n)), the smallest nonzero eigenvalue of the n-vertex path.
double path_emin_reference(std::uint64_t n);

struct GraphSpectrum {
    std::vector<double> eigenvalues;  // all N, ascending
    std::size_t kernel_dim = 0;       // number of clusters

    std::size_t size() const { return eigenvalues.size(); }
    std::size_t exact_zero_count() const;
};

GraphSpectrum graph_spectrum(const Graph& g, const ClusterDecomposition& d,
                             const SpectralOptions& opts = {});

// N^{-1} sum_j lambda_j^k for 0 <= k <= 12.
double spectral_moment(const GraphSpectrum& s, int k);

// Tr[A^power] of the cluster's adjacency matrix by counting closed walks.
// power must be even.
double adjacency_trace_power(const Cluster& c, int power);

std::vector<double> geometric_grid(double e_min, double e_max, std::size_t points);
std::vector<double> linear_grid(double e_min, double e_max, std::size_t points);

/// Monte Carlo estimate of the normalized eigenvalue counting function
/// N^{-1} #{lambda <= E} over R realizations.
struct IdsEstimate {
    std::uint64_t n_vertices = 0;
    double edge_prob = 0.0;
    std::uint64_t realizations = 0;  // realizations that entered the means
    std::uint64_t master_seed = 0;
    std::vector<double> energies;
    std::vector<Estimate> sigma_hat;
    Estimate sigma0_hat;              // mean K / N, structural
    std::vector<Estimate> delta_hat;  // paired sigma(E) - sigma(0) per realization
    std::vector<std::uint64_t> flagged;  // realizations skipped after an eigensolve error
    std::uint64_t clusters_seen = 0;
};

struct RunOptions {
    unsigned workers = 1;
    SpectralOptions spectral;
};

// Per-realization counting function values N^{-1} #{lambda <= E_i}.
std::vector<double> counting_function(const GraphSpectrum& s, std::span<const double> energies);

/// Requires a strictly increasing, strictly positive grid and R >= 1.
IdsEstimate empirical_ids(const GraphSpec& spec, std::uint64_t realizations,
                          std::span<const double> energies, const RunOptions& opts = {});

}  // namespace erlap

#endif  // ERLAP_SPECTRAL_HPP
