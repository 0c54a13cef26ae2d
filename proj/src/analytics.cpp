#include "erlap/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace erlap {

namespace {

constexpr double kTwoSqrt3 = 2.0 * 1.7320508075688772935;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

void require_subcritical(double p, const char* what) {
    if (!(p > 0.0 && p < 1.0)) {
        throw ParameterError(fmt::format("{}: p must lie in (0, 1), got {}", what, p));
    }
}

void require_energy(double e, const char* what) {
    if (!(e > 0.0) || !std::isfinite(e)) {
        throw ParameterError(fmt::format("{}: E must be positive, got {}", what, e));
    }
}

// ln n! - [n ln n - n + 0.5 ln(2 pi n)], asymptotic series, n >= 20.
double stirling_remainder(double n) {
    const double inv = 1.0 / n;
    const double inv2 = inv * inv;
    return inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
}

double log_choose(double n, double k) {
    k = std::min(k, n - k);
    if (k < 64.0) {
        // lgamma differences lose ~|lgamma(n)| ulps for large n
        double s = 0.0;
        for (double i = 1.0; i <= k; i += 1.0) s += std::log((n - k + i) / i);
        return s;
    }
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

double decay_f(double p) {
    if (!(p > 0.0)) throw ParameterError(fmt::format("decay_f: p must be positive, got {}", p));
    // (p - 1) - log1p(p - 1) avoids cancellation near p = 1.
    return (p - 1.0) - std::log1p(p - 1.0);
}

double decay_F(double p) {
    require_subcritical(p, "decay_F");
    return p - std::log(p);
}

std::int64_t m_of_E(double energy) {
    require_energy(energy, "m_of_E");
    const double x = std::floor(1.0 / std::sqrt(energy));
    return std::max<std::int64_t>(2, static_cast<std::int64_t>(x));
}

std::int64_t M_of_E(double energy) {
    require_energy(energy, "M_of_E");
    return static_cast<std::int64_t>(std::floor(std::sqrt(12.0 / energy))) + 1;
}

double zeta_three_halves_minus_one() {
    static const double value = [] {
        constexpr std::uint64_t cutoff = 1'000'000;
        CompensatedSum s;
        // smallest terms first
        for (std::uint64_t n = cutoff; n >= 2; --n) {
            const double x = static_cast<double>(n);
            s.add(1.0 / (x * std::sqrt(x)));
        }
        // sum_{n > M} n^{-3/2} = 2 M^{-1/2} - M^{-3/2}/2 + M^{-5/2}/8 + O(M^{-9/2})
        const double m = static_cast<double>(cutoff);
        const double rs = 1.0 / std::sqrt(m);
        s.add(2.0 * rs - 0.5 * rs / m + 0.125 * rs / (m * m));
        return s.value();
    }();
    return value;
}

double upper_bound_U(double energy, double p) {
    require_energy(energy, "upper_bound_U");
    require_subcritical(p, "upper_bound_U");
    const double f = decay_f(p);
    return zeta_three_halves_minus_one() / std::sqrt(2.0 * std::numbers::pi * p) *
           std::exp(-f * (1.0 / std::sqrt(energy) - 1.0));
}

double lower_bound_L(double energy, double p, LowerBoundForm form) {
    require_energy(energy, "lower_bound_L");
    require_subcritical(p, "lower_bound_L");
    const double F = decay_F(p);
    switch (form) {
        case LowerBoundForm::staircase:
            return std::exp(-F * static_cast<double>(M_of_E(energy))) / (2.0 * p);
        case LowerBoundForm::smooth:
            return std::exp(-F - kTwoSqrt3 * F / std::sqrt(energy)) / (2.0 * p);
    }
    return 0.0;
}

double log_tau_n(double p, std::uint64_t n) {
    require_subcritical(p, "tau_n");
    if (n == 0) throw ParameterError("tau_n: n must be at least 1");
    const double x = static_cast<double>(n);
    if (n < 20) {
        return (x - 2.0) * std::log(x) + (x - 1.0) * std::log(p) - x * p - std::lgamma(x + 1.0);
    }
    // Same expression with ln n! expanded by Stirling, so the O(n ln n)
    // pieces cancel analytically instead of in floating point.
    return -2.5 * std::log(x) - x * decay_f(p) - std::log(p) - kHalfLog2Pi -
           stirling_remainder(x);
}

double tau_n(double p, std::uint64_t n) { return std::exp(log_tau_n(p, n)); }

double log_tau_tail_bound(double p, std::uint64_t n) {
    require_subcritical(p, "tau_tail_bound");
    if (n == 0) throw ParameterError("tau_tail_bound: n must be at least 1");
    const double x = static_cast<double>(n);
    return -0.5 * std::log(2.0 * std::numbers::pi * p) - 2.5 * std::log(x) - x * decay_f(p);
}

double tau_tail_bound(double p, std::uint64_t n) { return std::exp(log_tau_tail_bound(p, n)); }

double log_tau_tail_bound_stirling(double p, std::uint64_t n) {
    require_subcritical(p, "tau_tail_bound_stirling");
    if (n == 0) throw ParameterError("tau_tail_bound_stirling: n must be at least 1");
    const double x = static_cast<double>(n);
    return -kHalfLog2Pi - std::log(p) - 2.5 * std::log(x) - x * decay_f(p);
}

double tau_tail_bound_stirling(double p, std::uint64_t n) {
    return std::exp(log_tau_tail_bound_stirling(p, n));
}

TauNormalization tau_normalization(double p, double tol, std::uint64_t max_terms) {
    require_subcritical(p, "tau_normalization");
    if (!(tol > 0.0)) throw ParameterError("tau_normalization: tol must be positive");
    const double f = decay_f(p);
    const double prefactor = std::exp(-kHalfLog2Pi - std::log(p));
    // sum_{n > M} n tau_n <= prefactor * int_M^inf x^{-3/2} e^{-f x} dx
    //                     <= prefactor * M^{-3/2} e^{-f M} / f
    auto tail_majorant = [&](double m) { return prefactor * std::exp(-1.5 * std::log(m) - f * m) / f; };

    TauNormalization out;
    CompensatedSum s;
    for (std::uint64_t n = 1; n <= max_terms; ++n) {
        s.add(static_cast<double>(n) * tau_n(p, n));
        const double tail = tail_majorant(static_cast<double>(n));
        if (tail < tol / 10.0) {
            out.partial_sum = s.value();
            out.n_used = n;
            out.tail_bound = tail;
            if (!(std::abs(out.partial_sum - 1.0) < tol)) {
                throw ConvergenceError(fmt::format(
                    "tau_normalization: partial sum {:.17g} misses 1 by more than {}",
                    out.partial_sum, tol));
            }
            return out;
        }
    }
    throw ConvergenceError(fmt::format(
        "tau_normalization: truncation budget exceeded ({} terms) for p = {}, tol = {}",
        max_terms, p, tol));
}

double linear_prob_finite(std::uint64_t n_vertices, double p, std::uint64_t m) {
    if (n_vertices < 2 || m < 2 || m > n_vertices) {
        throw ParameterError(
            fmt::format("linear_prob_finite: need 2 <= m <= N, got m = {}, N = {}", m, n_vertices));
    }
    const double n = static_cast<double>(n_vertices);
    if (!(p > 0.0 && p < n)) throw ParameterError("linear_prob_finite: p must lie in (0, N)");
    const double x = static_cast<double>(m);
    const double q = p / n;
    const double absent = (n - 3.0) * (x - 2.0) + 2.0 * (n - 2.0);
    const double log_prob = log_choose(n - 1.0, x - 1.0) + std::lgamma(x + 1.0) -
                            std::numbers::ln2 + (x - 1.0) * std::log(q) +
                            absent * std::log1p(-q);
    return std::exp(log_prob);
}

double linear_prob_limit(double p, std::uint64_t m) {
    require_subcritical(p, "linear_prob_limit");
    if (m < 2) throw ParameterError("linear_prob_limit: m must be at least 2");
    const double x = static_cast<double>(m);
    return std::exp(std::log(x / 2.0) + (x - 1.0) * std::log(p) - p * x);
}

double tree_prob_finite(std::uint64_t n_vertices, double p, std::uint64_t n) {
    if (n < 1 || n > n_vertices) {
        throw ParameterError(
            fmt::format("tree_prob_finite: need 1 <= n <= N, got n = {}, N = {}", n, n_vertices));
    }
    const double big = static_cast<double>(n_vertices);
    if (!(p > 0.0 && p < big)) throw ParameterError("tree_prob_finite: p must lie in (0, N)");
    const double x = static_cast<double>(n);
    const double q = p / big;
    const double absent = x * (big - x) + x * (x - 1.0) / 2.0 - x + 1.0;
    const double log_prob = -std::log(big) + log_choose(big, x) + (x - 2.0) * std::log(x) +
                            (x - 1.0) * std::log(q) + absent * std::log1p(-q);
    return std::exp(log_prob);
}

double poisson_moment(double p, int k) {
    if (!(p > 0.0)) throw ParameterError("poisson_moment: p must be positive");
    if (k < 0 || k > 24) throw ParameterError(fmt::format("poisson_moment: k = {} outside 0..24", k));
    if (k == 0) return 1.0;
    CompensatedSum s;
    const double log_p = std::log(p);
    // Terms rise until roughly n ~ p + k, then fall faster than geometrically.
    const double peak = p + static_cast<double>(k);
    for (std::uint64_t n = 1; n < 100'000'000; ++n) {
        const double x = static_cast<double>(n);
        const double term =
            std::exp(x * log_p + k * std::log(x) - std::lgamma(x + 1.0) - p);
        s.add(term);
        if (x > 2.0 * peak && term < 1e-17 * s.value()) return s.value();
    }
    throw ConvergenceError("poisson_moment: series did not converge");
}

double replica_Q(double p) {
    if (!(p > 0.0)) throw ParameterError("replica_Q: p must be positive");
    if (p <= 1.0) return 0.0;
    // The map Q -> 1 - e^{-pQ} is increasing with slope p e^{-pQ} < 1 above
    // the positive root, so iterating from Q = 1 descends monotonically onto it.
    double q = 1.0;
    for (int it = 0; it < 10'000; ++it) {
        const double next = -std::expm1(-p * q);
        if (std::abs(next - q) < 1e-15 && std::abs(next + std::expm1(-p * next)) < 1e-12) {
            return next;
        }
        q = next;
    }
    throw ConvergenceError(fmt::format("replica_Q: no convergence within 10^4 iterations, p = {}", p));
}

double replica_g(double p) {
    const double q = replica_Q(p);
    const double a = p * (1.0 - q);
    return -std::sqrt(1.0 - a) * std::log(a);
}

MomentInequalityReport moment_inequality_check(const EmpiricalMoments& m, const RunTag& expected) {
    if (!(m.run == expected)) {
        throw ParameterError(fmt::format(
            "moment_inequality_check: run (N={}, p={}, R={}) does not match (N={}, p={}, R={})",
            m.run.n_vertices, m.run.edge_prob, m.run.realizations, expected.n_vertices,
            expected.edge_prob, expected.realizations));
    }
    if (m.k < 1 || m.k > 4) {
        throw ParameterError(fmt::format("moment_inequality_check: k = {} outside 1..4", m.k));
    }
    MomentInequalityReport r;
    r.k = m.k;
    const double factor = std::ldexp(1.0, 2 * m.k - 1);
    r.left = m.laplacian.mean;
    r.left_se = m.laplacian.se_or(0.0);
    r.right = factor * (m.degree.mean + m.adjacency.mean);
    r.right_se = factor * std::hypot(m.degree.se_or(0.0), m.adjacency.se_or(0.0));
    r.slack = r.right - r.left;
    r.combined_se = std::hypot(r.left_se, r.right_se);
    r.holds = r.slack >= -4.0 * r.combined_se;
    return r;
}

BoundCurve make_bound_curve(double p, std::span<const double> energies) {
    BoundCurve c;
    c.p = p;
    c.f = decay_f(p);
    c.F = decay_F(p);
    c.energies.assign(energies.begin(), energies.end());
    for (double e : energies) {
        c.lower.push_back(lower_bound_L(e, p, LowerBoundForm::staircase));
        c.lower_smooth.push_back(lower_bound_L(e, p, LowerBoundForm::smooth));
        c.upper.push_back(upper_bound_U(e, p));
    }
    return c;
}

TauTable make_tau_table(double p, std::uint64_t n_max) {
    require_subcritical(p, "make_tau_table");
    TauTable t;
    t.p = p;
    CompensatedSum s;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        const double tau = tau_n(p, n);
        t.tau.push_back(tau);
        t.tail_bound.push_back(tau_tail_bound(p, n));
        t.tail_bound_stirling.push_back(tau_tail_bound_stirling(p, n));
        s.add(static_cast<double>(n) * tau);
        t.partial_sum.push_back(s.value());
    }
    return t;
}

}  // namespace erlap
