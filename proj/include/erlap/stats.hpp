#ifndef ERLAP_STATS_HPP
#define ERLAP_STATS_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>

namespace erlap {

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Sample mean with the standard error of the mean; stderr is empty when
/// fewer than two samples were seen.
struct Estimate {
    double mean = 0.0;
    std::optional<double> std_error;
    std::uint64_t samples = 0;

    double se_or(double fallback) const { return std_error.value_or(fallback); }
};

inline Estimate estimate_of(std::span<const double> xs) {
    Estimate e;
    e.samples = xs.size();
    if (xs.empty()) return e;
    CompensatedSum s;
    for (double x : xs) s.add(x);
    e.mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() >= 2) {
        CompensatedSum ss;
        for (double x : xs) ss.add((x - e.mean) * (x - e.mean));
        const double var = ss.value() / static_cast<double>(xs.size() - 1);
        e.std_error = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return e;
}

}  // namespace erlap

#endif  // ERLAP_STATS_HPP
