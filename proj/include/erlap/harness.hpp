#ifndef ERLAP_HARNESS_HPP
#define ERLAP_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "erlap/analytics.hpp"
#include "erlap/clusters.hpp"
#include "erlap/ensemble.hpp"
#include "erlap/spectral.hpp"
#include "erlap/stats.hpp"

namespace erlap {

inline constexpr std::string_view kFormatVersion = "erlap-1";

// Supplied at configure time from `git describe`, "unknown" otherwise.
std::string_view build_tag();

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class GridKind { geometric, linear, list };

struct GridSpec {
    GridKind kind = GridKind::geometric;
    double e_min = 0.05;
    double e_max = 0.5;
    std::size_t points = 10;
    std::vector<double> values;  // GridKind::list only

    std::vector<double> energies() const;
    bool operator==(const GridSpec&) const = default;
};

struct ExperimentConfig {
    std::uint64_t n_vertices = 10000;
    double edge_prob = 0.5;
    std::uint64_t realizations = 10;
    std::uint64_t master_seed = 1;
    GridSpec grid;
    unsigned workers = 1;
    std::filesystem::path out_dir = ".";
    std::uint64_t n_max = 50;       // census / tau table length
    int k_max = 2;                  // moments
    double tol = 1e-8;              // tau normalization
    std::uint64_t realization = 0;  // sample / spectrum

    // Throws ParameterError naming the first offending field.
    void validate() const;
    GraphSpec graph_spec() const { return {n_vertices, edge_prob, master_seed}; }

    // Flat key=value lines; doubles use shortest round-trip form.
    std::string to_text() const;
    static ExperimentConfig from_text(std::string_view text);
    static ExperimentConfig load(const std::filesystem::path& file);
    void save(const std::filesystem::path& file) const;

    // Everything except workers and out_dir, which do not affect results.
    std::vector<std::pair<std::string, std::string>> echo() const;

    bool operator==(const ExperimentConfig&) const = default;
};

// Ordered key=value record: the summary line, the summary file and the CSV
// metadata block all come from one of these.
struct Record {
    std::vector<std::pair<std::string, std::string>> entries;

    Record& set(std::string key, std::string value);
    Record& set(std::string key, const char* value) { return set(std::move(key), std::string(value)); }
    Record& set(std::string key, bool value) { return set(std::move(key), value ? "true" : "false"); }
    Record& set(std::string key, double value);
    Record& set(std::string key, std::uint64_t value);
    Record& set(std::string key, std::optional<double> value);
    const std::string* find(std::string_view key) const;
    std::string line() const;  // space-separated, single line
};

std::string format_number(double x);
std::string format_number(std::optional<double> x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// '#'-prefixed metadata (format version, build tag, command, config echo,
// extras), header row, then rows; LF endings.
void write_csv(const std::filesystem::path& file, std::string_view command,
               const ExperimentConfig& cfg, const Record& extra, const CsvTable& table);
void write_summary(const std::filesystem::path& file, std::string_view command,
                   const ExperimentConfig& cfg, const Record& summary);

inline constexpr double kNoiseFactor = 5.0;
inline constexpr double kEnergyGate = 0.5;

struct BoundsRow {
    double energy = 0.0;
    Estimate delta;
    std::optional<double> lower;
    std::optional<double> lower_smooth;
    std::optional<double> upper;
    std::optional<double> rescaled;  // -ln(delta) E^{1/2}
    bool above_noise_floor = false;
    bool gated = false;  // above the noise floor and E <= kEnergyGate
    bool in_window = false;
    std::string status;
};

struct BoundsReport {
    double edge_prob = 0.0;
    bool bounds_available = false;
    bool near_critical = false;
    std::optional<double> window_low;   // f(p)
    std::optional<double> window_high;  // 2 sqrt(3) F(p)
    std::optional<double> replica;
    std::vector<BoundsRow> rows;
    std::vector<std::string> warnings;

    std::size_t gated_count() const;
    std::size_t gated_outside_window() const;
};

BoundsReport make_bounds_report(const IdsEstimate& ids);

struct FitPoint {
    double energy = 0.0;
    double value = 0.0;
    std::optional<double> std_error;
};

struct ExcludedPoint {
    double energy = 0.0;
    double value = 0.0;
    std::string reason;
};

struct LifshitzFit {
    std::vector<FitPoint> used;
    std::vector<ExcludedPoint> excluded;
    double slope = 0.0;
    double slope_se = 0.0;
    double intercept = 0.0;
    bool weighted = false;
};

/// Regression of ln|ln value| on ln E. With standard errors present the fit
/// is weighted by the delta-method variance se^2 / (value ln value)^2 and
/// points below kNoiseFactor standard errors are excluded; without them the
/// fit is ordinary least squares with a residual-based slope error. Throws
/// FitError listing the exclusions when fewer than 4 points remain.
LifshitzFit fit_lifshitz(std::span<const FitPoint> points);
LifshitzFit fit_lifshitz(const IdsEstimate& ids);

struct AnchorFits {
    LifshitzFit upper;
    LifshitzFit lower_smooth;
};

inline constexpr double kAnchorEmin = 1e-4;
inline constexpr double kAnchorEmax = 1e-2;
inline constexpr std::size_t kAnchorPoints = 41;
inline constexpr double kSoftGateLow = -0.75;
inline constexpr double kSoftGateHigh = -0.25;

AnchorFits anchor_fits(double p);

struct IdsRun {
    IdsEstimate ids;
    BoundsReport bounds;
    Record summary;
};

struct CensusRow {
    std::size_t n = 0;
    double tau_hat = 0.0;
    std::optional<double> tau_se;
    std::optional<double> tau_exact;
    std::optional<double> tau_z;
    double tree_hat = 0.0;
    std::optional<double> tree_se;
    std::optional<double> tree_finite;
    std::optional<double> tree_z;
    double linear_hat = 0.0;
    std::optional<double> linear_se;
    std::optional<double> linear_finite;  // vertex probability / n
    std::optional<double> linear_z;
};

struct ChainRow {
    std::size_t m = 0;
    std::uint64_t hits = 0;
    double frequency = 0.0;
    std::optional<double> std_error;
    double exact = 0.0;
    std::optional<double> z;
};

struct CensusRun {
    CensusReport report;
    std::vector<CensusRow> rows;
    std::vector<ChainRow> chains;
    Record summary;
};

struct LifshitzRun {
    IdsEstimate ids;
    std::optional<LifshitzFit> fit;
    std::string fit_failure;
    std::optional<AnchorFits> anchors;  // 0 < p < 1 only
    Record summary;
};

struct MomentRow {
    int k = 1;
    Estimate laplacian;
    Estimate degree;
    Estimate adjacency;
    double poisson = 0.0;
    std::optional<double> degree_z;
    std::optional<double> laplacian_reference;  // k = 1: E[d^2] + E[d]
    std::optional<double> laplacian_z;
    MomentInequalityReport inequality;
};

struct MomentsRun {
    RunTag run;
    std::vector<MomentRow> rows;
    std::vector<std::uint64_t> flagged;
    Record summary;
};

struct PropertyResult {
    std::string name;
    std::uint64_t checked = 0;
    std::uint64_t violations = 0;
    bool gating = true;
    std::string first_violation;  // serialized instance
};

struct VerifyRun {
    std::vector<PropertyResult> properties;
    std::uint64_t clusters_checked = 0;
    Record summary;

    bool ok() const;
};

// Each run writes its artifacts into cfg.out_dir and fills `summary` with
// the fields of the printed summary line.
IdsRun run_ids(const ExperimentConfig& cfg);
CensusRun run_census(const ExperimentConfig& cfg);
LifshitzRun run_lifshitz(const ExperimentConfig& cfg);
MomentsRun run_moments(const ExperimentConfig& cfg);
VerifyRun run_verify(const ExperimentConfig& cfg);
Record run_sample(const ExperimentConfig& cfg);
Record run_spectrum(const ExperimentConfig& cfg);
Record run_bounds(const ExperimentConfig& cfg);
Record run_tau(const ExperimentConfig& cfg);

}  // namespace erlap

#endif  // ERLAP_HARNESS_HPP
