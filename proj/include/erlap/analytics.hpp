#ifndef ERLAP_ANALYTICS_HPP
#define ERLAP_ANALYTICS_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "erlap/ensemble.hpp"
#include "erlap/stats.hpp"

namespace erlap {

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Decay rate of the cluster-size tail, p - 1 - ln p. Requires p > 0.
double decay_f(double p);
// p - ln p = decay_f(p) + 1. Requires 0 < p < 1.
double decay_F(double p);

// max{2, floor(E^{-1/2})}
std::int64_t m_of_E(double energy);
// floor((12/E)^{1/2}) + 1, the smallest integer strictly above (12/E)^{1/2}
// as resolved by the floor of the computed double.
std::int64_t M_of_E(double energy);

// sum_{n>=2} n^{-3/2}, by direct summation to 10^6 plus an Euler-Maclaurin tail.
double zeta_three_halves_minus_one();

/// Upper bound on sigma(E) - sigma(0):
///   (zeta(3/2) - 1) (2 pi p)^{-1/2} exp{-f(p) (E^{-1/2} - 1)}.
double upper_bound_U(double energy, double p);

enum class LowerBoundForm {
    staircase,  // (2p)^{-1} exp[-F(p) M(E)]
    smooth,     // e^{-F(p)} / (2p) exp{-2 sqrt(3) F(p) E^{-1/2}}
};

double lower_bound_L(double energy, double p, LowerBoundForm form = LowerBoundForm::staircase);

/// Limiting density of size-n clusters, n^{n-2} p^{n-1} e^{-np} / n!.
double tau_n(double p, std::uint64_t n);
double log_tau_n(double p, std::uint64_t n);
/// (2 pi p)^{-1/2} n^{-5/2} e^{-n f(p)}, the exponential tail envelope in
/// its commonly quoted form. Note that this form sits below tau_n by roughly
/// a factor p^{1/2}; use tau_tail_bound_stirling for a true majorant.
double tau_tail_bound(double p, std::uint64_t n);
double log_tau_tail_bound(double p, std::uint64_t n);
/// (2 pi)^{-1/2} p^{-1} n^{-5/2} e^{-n f(p)}, obtained from
/// n! >= (n/e)^n sqrt(2 pi n); dominates tau_n for every n.
double tau_tail_bound_stirling(double p, std::uint64_t n);
double log_tau_tail_bound_stirling(double p, std::uint64_t n);

struct TauNormalization {
    double partial_sum = 0.0;  // sum_{n <= n_used} n tau_n(p)
    std::uint64_t n_used = 0;
    double tail_bound = 0.0;  // majorant of the omitted tail
};

// Sums n tau_n until the integral-majorized tail is below tol / 10.
// Throws ConvergenceError if the truncation budget runs out or the partial
// sum misses 1 by tol or more.
TauNormalization tau_normalization(double p, double tol,
                                   std::uint64_t max_terms = 10'000'000);

/// Finite-N probability that vertex 0's cluster is a linear chain of m
/// vertices, in the closed form
///   C(N-1, m-1) (m!/2) (p/N)^{m-1} (1 - p/N)^{(N-3)(m-2) + 2(N-2)}.
double linear_prob_finite(std::uint64_t n_vertices, double p, std::uint64_t m);
/// N -> infinity limit, (m/2) p^{m-1} e^{-pm}.
double linear_prob_limit(double p, std::uint64_t m);

/// Finite-N density of size-n tree clusters:
///   N^{-1} C(N, n) n^{n-2} (p/N)^{n-1} (1 - p/N)^{n(N-n) + C(n,2) - n + 1}.
double tree_prob_finite(std::uint64_t n_vertices, double p, std::uint64_t n);

/// k-th raw moment of Poisson(p), e^{-p} sum_n p^n n^k / n!. 0 <= k <= 24.
double poisson_moment(double p, int k);

// Largest nonnegative root of Q = 1 - e^{-pQ}; 0 for p <= 1.
double replica_Q(double p);
/// Non-rigorous replica prediction of the Lifshitz decay rate,
/// -[1 - p(1 - Q_p)]^{1/2} ln[p(1 - Q_p)].
double replica_g(double p);

struct RunTag {
    std::uint64_t n_vertices = 0;
    double edge_prob = 0.0;
    std::uint64_t realizations = 0;

    bool operator==(const RunTag&) const = default;
};

/// Empirical per-vertex moments N^{-1} Tr[X^{2k}] for X = Laplacian, degree
/// matrix and adjacency matrix, estimated over one run.
struct EmpiricalMoments {
    RunTag run;
    int k = 1;
    Estimate laplacian;
    Estimate degree;
    Estimate adjacency;
};

struct MomentInequalityReport {
    int k = 1;
    double left = 0.0;
    double left_se = 0.0;
    double right = 0.0;  // 2^{2k-1} (M^D + M^A)
    double right_se = 0.0;
    double slack = 0.0;  // right - left
    double combined_se = 0.0;
    bool holds = false;  // slack >= -4 combined_se
};

// Throws ParameterError when the three moments come from different runs
// (tags are compared by the caller through `expected`) or k is outside 1..4.
MomentInequalityReport moment_inequality_check(const EmpiricalMoments& m, const RunTag& expected);

struct BoundCurve {
    double p = 0.0;
    double f = 0.0;
    double F = 0.0;
    std::vector<double> energies;
    std::vector<double> lower;         // staircase form
    std::vector<double> lower_smooth;  // smooth form
    std::vector<double> upper;
};

BoundCurve make_bound_curve(double p, std::span<const double> energies);

struct TauTable {
    double p = 0.0;
    std::vector<double> tau;          // index n - 1
    std::vector<double> tail_bound;   // index n - 1
    std::vector<double> tail_bound_stirling;
    std::vector<double> partial_sum;  // sum_{j <= n} j tau_j
};

TauTable make_tau_table(double p, std::uint64_t n_max);

}  // namespace erlap

#endif  // ERLAP_ANALYTICS_HPP
