#include "erlap/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "erlap/parallel.hpp"

#ifndef ERLAP_BUILD_TAG
#define ERLAP_BUILD_TAG "unknown"
#endif

namespace erlap {

std::string_view build_tag() { return ERLAP_BUILD_TAG; }

namespace {

constexpr std::string_view kFormulaVersion = "1";
const double kTwoSqrt3 = 2.0 * std::numbers::sqrt3;

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(std::string_view key, std::string_view v) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(x)) {
        throw ParameterError(fmt::format("config: {} = '{}' is not a finite number", key, v));
    }
    return x;
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
    std::uint64_t x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParameterError(fmt::format("config: {} = '{}' is not a nonnegative integer", key, v));
    }
    return x;
}

std::vector<double> parse_list(std::string_view key, std::string_view v) {
    std::vector<double> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        out.push_back(parse_double(key, trim(v.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    return out;
}

std::string_view grid_kind_name(GridKind k) {
    switch (k) {
        case GridKind::geometric: return "geometric";
        case GridKind::linear: return "linear";
        case GridKind::list: return "list";
    }
    return "geometric";
}

std::string join_numbers(std::span<const double> xs, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += sep;
        out += format_number(xs[i]);
    }
    return out;
}

std::ofstream open_output(const std::filesystem::path& file) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", file.string()));
    return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& file) {
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("write to {} failed", file.string()));
}

void write_header_block(std::ostream& out, std::string_view prefix, std::string_view command,
                        const ExperimentConfig& cfg) {
    out << prefix << "format_version=" << kFormatVersion << '\n';
    out << prefix << "build_tag=" << build_tag() << '\n';
    out << prefix << "command=" << command << '\n';
    for (const auto& [k, v] : cfg.echo()) out << prefix << k << '=' << v << '\n';
}

std::optional<double> z_score(double observed, std::optional<double> expected,
                              std::optional<double> se) {
    if (!expected || !se || !(*se > 0.0)) return std::nullopt;
    return (observed - *expected) / *se;
}

bool subcritical(double p) { return p > 0.0 && p < 1.0; }

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "NA";
    return fmt::format("{}", x);
}

std::string format_number(std::optional<double> x) { return x ? format_number(*x) : "NA"; }

std::vector<double> GridSpec::energies() const {
    switch (kind) {
        case GridKind::geometric: return geometric_grid(e_min, e_max, points);
        case GridKind::linear: return linear_grid(e_min, e_max, points);
        case GridKind::list: {
            if (values.empty()) throw ParameterError("energy list is empty");
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (!(values[i] > 0.0)) throw ParameterError("energy list must be strictly positive");
                if (i && !(values[i] > values[i - 1])) {
                    throw ParameterError("energy list must be strictly increasing");
                }
            }
            return values;
        }
    }
    throw ParameterError("unknown grid kind");
}

void ExperimentConfig::validate() const {
    if (n_vertices < 2 || n_vertices > 0xffffffffull) {
        throw ParameterError(fmt::format("n_vertices = {} outside [2, 2^32 - 1]", n_vertices));
    }
    graph_spec().validate();
    if (realizations < 1 || realizations > 1'000'000'000) {
        throw ParameterError(fmt::format("realizations = {} outside [1, 10^9]", realizations));
    }
    if (grid.points > 1'000'000) throw ParameterError("grid points above 10^6");
    grid.energies();
    if (workers < 1 || workers > 1024) {
        throw ParameterError(fmt::format("workers = {} outside [1, 1024]", workers));
    }
    if (n_max < 1 || n_max > 10'000'000) {
        throw ParameterError(fmt::format("n_max = {} outside [1, 10^7]", n_max));
    }
    if (k_max < 1 || k_max > 4) throw ParameterError(fmt::format("k_max = {} outside [1, 4]", k_max));
    if (!(tol > 0.0 && tol < 1.0)) throw ParameterError(fmt::format("tol = {} outside (0, 1)", tol));
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
    return {
        {"n_vertices", std::to_string(n_vertices)},
        {"edge_prob", format_number(edge_prob)},
        {"realizations", std::to_string(realizations)},
        {"master_seed", std::to_string(master_seed)},
        {"grid", std::string(grid_kind_name(grid.kind))},
        {"grid_emin", format_number(grid.e_min)},
        {"grid_emax", format_number(grid.e_max)},
        {"grid_points", std::to_string(grid.points)},
        {"grid_values", join_numbers(grid.values, ",")},
        {"n_max", std::to_string(n_max)},
        {"k_max", std::to_string(k_max)},
        {"tol", format_number(tol)},
        {"realization", std::to_string(realization)},
    };
}

std::string ExperimentConfig::to_text() const {
    std::string out;
    for (const auto& [k, v] : echo()) out += k + "=" + v + "\n";
    out += "workers=" + std::to_string(workers) + "\n";
    out += "out_dir=" + out_dir.string() + "\n";
    return out;
}

ExperimentConfig ExperimentConfig::from_text(std::string_view text) {
    ExperimentConfig c;
    std::map<std::string, std::string, std::less<>> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParameterError(fmt::format("config: line '{}' is not key=value", line));
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view v = trim(line.substr(eq + 1));
        if (!seen.emplace(key, v).second) throw ParameterError(fmt::format("config: duplicate key {}", key));

        if (key == "n_vertices") c.n_vertices = parse_uint(key, v);
        else if (key == "edge_prob") c.edge_prob = parse_double(key, v);
        else if (key == "realizations") c.realizations = parse_uint(key, v);
        else if (key == "master_seed") c.master_seed = parse_uint(key, v);
        else if (key == "grid") {
            if (v == "geometric") c.grid.kind = GridKind::geometric;
            else if (v == "linear") c.grid.kind = GridKind::linear;
            else if (v == "list") c.grid.kind = GridKind::list;
            else throw ParameterError(fmt::format("config: unknown grid kind '{}'", v));
        }
        else if (key == "grid_emin") c.grid.e_min = parse_double(key, v);
        else if (key == "grid_emax") c.grid.e_max = parse_double(key, v);
        else if (key == "grid_points") c.grid.points = parse_uint(key, v);
        else if (key == "grid_values") c.grid.values = parse_list(key, v);
        else if (key == "workers") {
            const auto w = parse_uint(key, v);
            if (w > 1024) throw ParameterError("config: workers above 1024");
            c.workers = static_cast<unsigned>(w);
        }
        else if (key == "out_dir") c.out_dir = std::string(v);
        else if (key == "n_max") c.n_max = parse_uint(key, v);
        else if (key == "k_max") {
            const auto k = parse_uint(key, v);
            if (k > 4) throw ParameterError("config: k_max above 4");
            c.k_max = static_cast<int>(k);
        }
        else if (key == "tol") c.tol = parse_double(key, v);
        else if (key == "realization") c.realization = parse_uint(key, v);
        else throw ParameterError(fmt::format("config: unknown key {}", key));
    }
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot read config {}", file.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

void ExperimentConfig::save(const std::filesystem::path& file) const {
    auto out = open_output(file);
    out << to_text();
    finish_output(out, file);
}

Record& Record::set(std::string key, std::string value) {
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = std::move(value);
            return *this;
        }
    }
    entries.emplace_back(std::move(key), std::move(value));
    return *this;
}

Record& Record::set(std::string key, double value) { return set(std::move(key), format_number(value)); }

Record& Record::set(std::string key, std::uint64_t value) {
    return set(std::move(key), std::to_string(value));
}

Record& Record::set(std::string key, std::optional<double> value) {
    return set(std::move(key), format_number(value));
}

const std::string* Record::find(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::string Record::line() const {
    std::string out;
    for (const auto& [k, v] : entries) {
        if (!out.empty()) out += ' ';
        out += k + "=" + v;
    }
    return out;
}

void write_csv(const std::filesystem::path& file, std::string_view command,
               const ExperimentConfig& cfg, const Record& extra, const CsvTable& table) {
    auto out = open_output(file);
    write_header_block(out, "# ", command, cfg);
    for (const auto& [k, v] : extra.entries) out << "# " << k << '=' << v << '\n';
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size()) {
            throw std::logic_error(fmt::format("{}: row width {} != header width {}", file.string(),
                                               row.size(), table.header.size()));
        }
        emit(row);
    }
    finish_output(out, file);
}

void write_summary(const std::filesystem::path& file, std::string_view command,
                   const ExperimentConfig& cfg, const Record& summary) {
    auto out = open_output(file);
    write_header_block(out, "", command, cfg);
    for (const auto& [k, v] : summary.entries) out << k << '=' << v << '\n';
    finish_output(out, file);
}

// ---------------------------------------------------------------- bounds

std::size_t BoundsReport::gated_count() const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const BoundsRow& r) { return r.gated; }));
}

std::size_t BoundsReport::gated_outside_window() const {
    return static_cast<std::size_t>(std::count_if(
        rows.begin(), rows.end(), [](const BoundsRow& r) { return r.status == "outside_window"; }));
}

BoundsReport make_bounds_report(const IdsEstimate& ids) {
    BoundsReport b;
    const double p = ids.edge_prob;
    b.edge_prob = p;
    b.bounds_available = subcritical(p);
    if (!b.bounds_available) {
        b.warnings.push_back("bounds omitted: p outside (0, 1)");
    } else {
        b.window_low = decay_f(p);
        b.window_high = kTwoSqrt3 * decay_F(p);
        if (p >= 0.99) {
            b.near_critical = true;
            b.warnings.push_back("near-critical: slow convergence expected");
        }
    }
    try {
        b.replica = replica_g(p);
    } catch (const std::exception&) {
        b.replica.reset();
    }
    for (std::size_t i = 0; i < ids.energies.size(); ++i) {
        BoundsRow r;
        r.energy = ids.energies[i];
        r.delta = ids.delta_hat[i];
        if (b.bounds_available) {
            r.lower = lower_bound_L(r.energy, p, LowerBoundForm::staircase);
            r.lower_smooth = lower_bound_L(r.energy, p, LowerBoundForm::smooth);
            r.upper = upper_bound_U(r.energy, p);
        }
        if (r.delta.mean > 0.0) r.rescaled = -std::log(r.delta.mean) * std::sqrt(r.energy);
        r.above_noise_floor =
            r.delta.std_error && r.delta.mean > 0.0 && r.delta.mean > kNoiseFactor * *r.delta.std_error;
        r.gated = r.above_noise_floor && r.energy <= kEnergyGate;
        r.in_window = b.bounds_available && r.rescaled && *r.rescaled >= *b.window_low &&
                      *r.rescaled <= *b.window_high;
        if (!r.delta.std_error) r.status = "no_standard_error";
        else if (!r.above_noise_floor) r.status = "empirical_below_noise_floor";
        else if (r.energy > kEnergyGate) r.status = "above_energy_gate";
        else if (!b.bounds_available) r.status = "no_bounds";
        else r.status = r.in_window ? "in_window" : "outside_window";
        b.rows.push_back(std::move(r));
    }
    return b;
}

// ---------------------------------------------------------------- fits

LifshitzFit fit_lifshitz(std::span<const FitPoint> points) {
    LifshitzFit fit;
    fit.weighted = !points.empty() && std::all_of(points.begin(), points.end(), [](const FitPoint& p) {
        return p.std_error.has_value();
    });
    std::vector<double> xs, ys, ws;
    for (const auto& pt : points) {
        std::string reason;
        if (!(pt.energy > 0.0)) reason = "nonpositive energy";
        else if (!(pt.value > 0.0)) reason = "nonpositive value";
        else if (!(pt.value < 1.0)) reason = "value not below 1";
        else if (fit.weighted && !(pt.value > kNoiseFactor * *pt.std_error)) reason = "below noise floor";
        else if (fit.weighted && !(*pt.std_error > 0.0)) reason = "zero standard error";
        if (!reason.empty()) {
            fit.excluded.push_back({pt.energy, pt.value, reason});
            continue;
        }
        const double l = std::log(pt.value);
        xs.push_back(std::log(pt.energy));
        ys.push_back(std::log(std::abs(l)));
        if (fit.weighted) {
            const double sd = *pt.std_error / std::abs(pt.value * l);
            ws.push_back(1.0 / (sd * sd));
        } else {
            ws.push_back(1.0);
        }
        fit.used.push_back(pt);
    }
    auto failure = [&](const std::string& what) {
        std::string msg = what;
        for (const auto& e : fit.excluded) {
            msg += fmt::format("; E={} value={}: {}", format_number(e.energy), format_number(e.value),
                               e.reason);
        }
        return FitError(msg);
    };
    if (fit.used.size() < 4) {
        throw failure(fmt::format("fit needs at least 4 usable points, got {}", fit.used.size()));
    }
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sw += ws[i];
        sx += ws[i] * xs[i];
        sy += ws[i] * ys[i];
    }
    const double xm = sx / sw;
    const double ym = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += ws[i] * (xs[i] - xm) * (xs[i] - xm);
        sxy += ws[i] * (xs[i] - xm) * (ys[i] - ym);
    }
    if (!(sxx > 0.0)) throw failure("fit abscissae are degenerate");
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    if (fit.weighted) {
        fit.slope_se = std::sqrt(1.0 / sxx);
    } else {
        double rss = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double r = ys[i] - fit.intercept - fit.slope * xs[i];
            rss += r * r;
        }
        fit.slope_se = std::sqrt(rss / static_cast<double>(xs.size() - 2) / sxx);
    }
    return fit;
}

LifshitzFit fit_lifshitz(const IdsEstimate& ids) {
    std::vector<FitPoint> pts;
    for (std::size_t i = 0; i < ids.energies.size(); ++i) {
        pts.push_back({ids.energies[i], ids.delta_hat[i].mean, ids.delta_hat[i].std_error});
    }
    return fit_lifshitz(pts);
}

AnchorFits anchor_fits(double p) {
    if (!subcritical(p)) throw ParameterError("anchor fits need 0 < p < 1");
    const auto grid = geometric_grid(kAnchorEmin, kAnchorEmax, kAnchorPoints);
    std::vector<FitPoint> upper, lower;
    for (double e : grid) {
        upper.push_back({e, upper_bound_U(e, p), std::nullopt});
        lower.push_back({e, lower_bound_L(e, p, LowerBoundForm::smooth), std::nullopt});
    }
    return {fit_lifshitz(upper), fit_lifshitz(lower)};
}

// ---------------------------------------------------------------- runs

namespace {

Record gate_metadata() {
    Record r;
    r.set("noise_factor", kNoiseFactor);
    r.set("energy_gate", kEnergyGate);
    return r;
}

std::string join_flagged(const std::vector<std::uint64_t>& flagged) {
    std::string out;
    for (auto r : flagged) {
        if (!out.empty()) out += ';';
        out += std::to_string(r);
    }
    return out.empty() ? "none" : out;
}

std::string serialize_cluster(const Cluster& c) {
    std::string out = "vertices=[";
    for (std::size_t i = 0; i < c.vertices.size(); ++i) out += (i ? " " : "") + std::to_string(c.vertices[i]);
    out += "] edges=[";
    for (std::size_t i = 0; i < c.edges.size(); ++i) {
        out += fmt::format("{}{}-{}", i ? " " : "", c.edges[i].first, c.edges[i].second);
    }
    return out + "]";
}

}  // namespace

IdsRun run_ids(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto energies = cfg.grid.energies();
    IdsRun run;
    run.ids = empirical_ids(cfg.graph_spec(), cfg.realizations, energies, {cfg.workers, {}});
    run.bounds = make_bounds_report(run.ids);
    const auto& ids = run.ids;
    const auto& b = run.bounds;

    Record meta;
    meta.set("realizations_used", ids.realizations);
    meta.set("flagged_realizations", join_flagged(ids.flagged));
    meta.set("clusters_seen", ids.clusters_seen);
    meta.set("sigma0_hat", ids.sigma0_hat.mean);
    meta.set("sigma0_stderr", ids.sigma0_hat.std_error);
    CsvTable t{{"E", "sigma_hat", "sigma_stderr", "delta_hat", "delta_stderr"}, {}};
    for (std::size_t i = 0; i < energies.size(); ++i) {
        t.rows.push_back({format_number(energies[i]), format_number(ids.sigma_hat[i].mean),
                          format_number(ids.sigma_hat[i].std_error),
                          format_number(ids.delta_hat[i].mean),
                          format_number(ids.delta_hat[i].std_error)});
    }
    write_csv(cfg.out_dir / "ids.csv", "ids", cfg, meta, t);

    Record bmeta = gate_metadata();
    bmeta.set("bounds_available", b.bounds_available);
    bmeta.set("window_low", b.window_low);
    bmeta.set("window_high", b.window_high);
    bmeta.set("replica_g_nonrigorous", b.replica);
    for (std::size_t i = 0; i < b.warnings.size(); ++i) bmeta.set(fmt::format("warning_{}", i), b.warnings[i]);
    CsvTable bt{{"E", "delta_hat", "delta_stderr", "L_staircase", "L_smooth", "U", "rescaled",
                 "window_low", "window_high", "status"},
                {}};
    for (const auto& r : b.rows) {
        bt.rows.push_back({format_number(r.energy), format_number(r.delta.mean),
                           format_number(r.delta.std_error), format_number(r.lower),
                           format_number(r.lower_smooth), format_number(r.upper),
                           format_number(r.rescaled), format_number(b.window_low),
                           format_number(b.window_high), r.status});
    }
    write_csv(cfg.out_dir / "bounds.csv", "ids", cfg, bmeta, bt);

    auto& s = run.summary;
    s.set("status", "ok");
    s.set("realizations_used", ids.realizations);
    s.set("flagged", static_cast<std::uint64_t>(ids.flagged.size()));
    s.set("clusters_seen", ids.clusters_seen);
    s.set("sigma0_hat", ids.sigma0_hat.mean);
    s.set("gated_points", static_cast<std::uint64_t>(b.gated_count()));
    s.set("gated_outside_window", static_cast<std::uint64_t>(b.gated_outside_window()));
    s.set("replica_g_nonrigorous", b.replica);
    if (cfg.edge_prob >= 1.0) {
        // reported only; no claim is made about the limit here
        s.set("sigma0_drift_at_emin", ids.sigma_hat.front().mean - ids.sigma0_hat.mean);
    }
    if (!b.warnings.empty()) {
        std::string w;
        for (const auto& x : b.warnings) w += (w.empty() ? "" : "; ") + x;
        s.set("warnings", "\"" + w + "\"");
    }
    write_summary(cfg.out_dir / "ids_summary.txt", "ids", cfg, s);
    return run;
}

CensusRun run_census(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto spec = cfg.graph_spec();
    std::vector<CensusReport> per(cfg.realizations);
    for_each_index(cfg.realizations, cfg.workers, [&](std::uint64_t r) {
        per[r] = CensusReport::of_realization(decompose(sample_graph(spec, r)), spec.edge_prob);
    });
    CensusRun run;
    auto& rep = run.report;
    for (const auto& c : per) rep.merge(c);
    per.clear();

    const double p = cfg.edge_prob;
    const std::size_t top = std::min<std::size_t>(rep.max_size(), cfg.n_max);
    for (std::size_t n = 1; n <= top; ++n) {
        CensusRow row;
        row.n = n;
        row.tau_hat = rep.tau_hat(n);
        row.tau_se = rep.tau_stderr(n);
        if (subcritical(p)) row.tau_exact = tau_n(p, n);
        row.tau_z = z_score(row.tau_hat, row.tau_exact, row.tau_se);
        row.tree_hat = rep.tree_density(n);
        row.tree_se = rep.tree_density_stderr(n);
        row.tree_finite = tree_prob_finite(cfg.n_vertices, p, n);
        row.tree_z = z_score(row.tree_hat, row.tree_finite, row.tree_se);
        row.linear_hat = rep.linear_density(n);
        row.linear_se = rep.linear_density_stderr(n);
        if (n >= 2) row.linear_finite = linear_prob_finite(cfg.n_vertices, p, n) / static_cast<double>(n);
        row.linear_z = z_score(row.linear_hat, row.linear_finite, row.linear_se);
        run.rows.push_back(row);
    }

    const double reps = static_cast<double>(rep.realizations);
    const std::size_t chain_top =
        std::min<std::size_t>({cfg.n_max, rep.vertex0_linear.empty() ? 0 : rep.vertex0_linear.size() - 1,
                               static_cast<std::size_t>(cfg.n_vertices)});
    for (std::size_t m = 2; m <= chain_top; ++m) {
        ChainRow c;
        c.m = m;
        c.hits = rep.count_at(rep.vertex0_linear, m);
        c.frequency = static_cast<double>(c.hits) / reps;
        if (rep.realizations >= 2) c.std_error = std::sqrt(c.frequency * (1.0 - c.frequency) / reps);
        c.exact = linear_prob_finite(cfg.n_vertices, p, m);
        c.z = z_score(c.frequency, c.exact, c.std_error);
        run.chains.push_back(c);
    }

    Record meta;
    meta.set("clusters_per_vertex", rep.clusters_per_vertex());
    meta.set("clusters_per_vertex_stderr", rep.clusters_per_vertex_stderr());
    meta.set("tree_vertex_fraction", rep.tree_vertex_fraction());
    CsvTable t{{"n", "clusters", "trees", "linear", "tau_hat", "tau_stderr", "tau_exact", "tau_z",
                "tree_hat", "tree_stderr", "tree_finite", "tree_z", "linear_hat", "linear_stderr",
                "linear_finite", "linear_z"},
               {}};
    for (const auto& r : run.rows) {
        t.rows.push_back({std::to_string(r.n), std::to_string(rep.count_at(rep.clusters, r.n)),
                          std::to_string(rep.count_at(rep.trees, r.n)),
                          std::to_string(rep.count_at(rep.linear, r.n)), format_number(r.tau_hat),
                          format_number(r.tau_se), format_number(r.tau_exact), format_number(r.tau_z),
                          format_number(r.tree_hat), format_number(r.tree_se),
                          format_number(r.tree_finite), format_number(r.tree_z),
                          format_number(r.linear_hat), format_number(r.linear_se),
                          format_number(r.linear_finite), format_number(r.linear_z)});
    }
    write_csv(cfg.out_dir / "census.csv", "census", cfg, meta, t);

    CsvTable ct{{"m", "hits", "frequency", "stderr", "exact", "z"}, {}};
    for (const auto& c : run.chains) {
        ct.rows.push_back({std::to_string(c.m), std::to_string(c.hits), format_number(c.frequency),
                           format_number(c.std_error), format_number(c.exact), format_number(c.z)});
    }
    write_csv(cfg.out_dir / "vertex0_chains.csv", "census", cfg, {}, ct);

    double worst = 0.0;
    bool any_z = false;
    for (const auto& r : run.rows) {
        if (r.n <= 8 && r.tau_z) {
            worst = std::max(worst, std::abs(*r.tau_z));
            any_z = true;
        }
    }
    auto& s = run.summary;
    s.set("status", "ok");
    s.set("realizations", rep.realizations);
    s.set("max_size", static_cast<std::uint64_t>(rep.max_size()));
    s.set("clusters_per_vertex", rep.clusters_per_vertex());
    s.set("tree_vertex_fraction", rep.tree_vertex_fraction());
    s.set("max_abs_tau_z_small_n", any_z ? std::optional<double>(worst) : std::nullopt);
    write_summary(cfg.out_dir / "census_summary.txt", "census", cfg, s);
    return run;
}

LifshitzRun run_lifshitz(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto energies = cfg.grid.energies();
    LifshitzRun run;
    run.ids = empirical_ids(cfg.graph_spec(), cfg.realizations, energies, {cfg.workers, {}});
    try {
        run.fit = fit_lifshitz(run.ids);
    } catch (const FitError& e) {
        run.fit_failure = e.what();
    }
    if (subcritical(cfg.edge_prob)) run.anchors = anchor_fits(cfg.edge_prob);

    CsvTable t{{"E", "delta_hat", "delta_stderr", "lnln", "status"}, {}};
    for (std::size_t i = 0; i < energies.size(); ++i) {
        const auto& d = run.ids.delta_hat[i];
        std::string status = "used";
        std::optional<double> y;
        if (d.mean > 0.0 && d.mean < 1.0) y = std::log(std::abs(std::log(d.mean)));
        if (run.fit) {
            for (const auto& e : run.fit->excluded) {
                if (e.energy == energies[i]) status = e.reason;
            }
        } else {
            status = "fit_failed";
        }
        std::replace(status.begin(), status.end(), ' ', '_');
        t.rows.push_back({format_number(energies[i]), format_number(d.mean),
                          format_number(d.std_error), format_number(y), status});
    }
    Record meta = gate_metadata();
    if (run.fit) {
        meta.set("slope", run.fit->slope);
        meta.set("slope_stderr", run.fit->slope_se);
        meta.set("intercept", run.fit->intercept);
    }
    write_csv(cfg.out_dir / "lifshitz.csv", "lifshitz", cfg, meta, t);

    auto& s = run.summary;
    s.set("status", run.fit ? "ok" : "fit_failed");
    if (run.fit) {
        const auto& f = *run.fit;
        s.set("slope", f.slope);
        s.set("slope_stderr", f.slope_se);
        s.set("points_used", static_cast<std::uint64_t>(f.used.size()));
        s.set("points_excluded", static_cast<std::uint64_t>(f.excluded.size()));
        s.set("soft_gate", fmt::format("[{},{}]", kSoftGateLow, kSoftGateHigh));
        s.set("in_soft_gate", f.slope >= kSoftGateLow && f.slope <= kSoftGateHigh);
    } else {
        s.set("failure", "\"" + run.fit_failure + "\"");
    }
    if (run.anchors) {
        s.set("anchor_grid", fmt::format("[{},{}]x{}", kAnchorEmin, kAnchorEmax, kAnchorPoints));
        s.set("anchor_upper_slope", run.anchors->upper.slope);
        s.set("anchor_lower_smooth_slope", run.anchors->lower_smooth.slope);
    }
    s.set("flagged", static_cast<std::uint64_t>(run.ids.flagged.size()));
    write_summary(cfg.out_dir / "lifshitz_summary.txt", "lifshitz", cfg, s);
    return run;
}

namespace {

struct RealizationMoments {
    bool ok = false;
    std::vector<double> laplacian, degree, adjacency;  // index k - 1
};

}  // namespace

MomentsRun run_moments(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto spec = cfg.graph_spec();
    const int kmax = cfg.k_max;
    std::vector<RealizationMoments> per(cfg.realizations);
    for_each_index(cfg.realizations, cfg.workers, [&](std::uint64_t r) {
        const Graph g = sample_graph(spec, r);
        const ClusterDecomposition d = decompose(g);
        auto& slot = per[r];
        GraphSpectrum s;
        try {
            s = graph_spectrum(g, d);
        } catch (const EigensolveError&) {
            return;
        }
        const auto deg = degree_sequence(g);
        const double n = static_cast<double>(g.n());
        for (int k = 1; k <= kmax; ++k) {
            slot.laplacian.push_back(spectral_moment(s, 2 * k));
            CompensatedSum ds;
            for (auto x : deg) ds.add(std::pow(static_cast<double>(x), 2 * k));
            slot.degree.push_back(ds.value() / n);
            CompensatedSum as;
            for (const auto& c : d.clusters) {
                if (c.size() > 1) as.add(adjacency_trace_power(c, 2 * k));
            }
            slot.adjacency.push_back(as.value() / n);
        }
        slot.ok = true;
    });

    MomentsRun run;
    std::vector<std::vector<double>> lap(kmax), deg(kmax), adj(kmax);
    for (std::uint64_t r = 0; r < cfg.realizations; ++r) {
        if (!per[r].ok) {
            run.flagged.push_back(r);
            continue;
        }
        for (int k = 0; k < kmax; ++k) {
            lap[k].push_back(per[r].laplacian[k]);
            deg[k].push_back(per[r].degree[k]);
            adj[k].push_back(per[r].adjacency[k]);
        }
    }
    const std::uint64_t used = cfg.realizations - run.flagged.size();
    if (used == 0) throw std::runtime_error("moments: every realization was flagged by the eigensolver");
    run.run = {cfg.n_vertices, cfg.edge_prob, used};
    const double p = cfg.edge_prob;
    for (int k = 1; k <= kmax; ++k) {
        MomentRow row;
        row.k = k;
        row.laplacian = estimate_of(lap[k - 1]);
        row.degree = estimate_of(deg[k - 1]);
        row.adjacency = estimate_of(adj[k - 1]);
        row.poisson = poisson_moment(p, 2 * k);
        row.degree_z = z_score(row.degree.mean, row.poisson, row.degree.std_error);
        if (k == 1) row.laplacian_reference = poisson_moment(p, 2) + p;
        row.laplacian_z = z_score(row.laplacian.mean, row.laplacian_reference, row.laplacian.std_error);
        row.inequality = moment_inequality_check({run.run, k, row.laplacian, row.degree, row.adjacency}, run.run);
        run.rows.push_back(row);
    }

    CsvTable t{{"k", "power", "laplacian", "laplacian_stderr", "laplacian_reference", "laplacian_z",
                "degree", "degree_stderr", "poisson", "degree_z", "adjacency", "adjacency_stderr",
                "right_side", "slack", "combined_stderr", "holds"},
               {}};
    for (const auto& r : run.rows) {
        const auto& q = r.inequality;
        t.rows.push_back({std::to_string(r.k), std::to_string(2 * r.k), format_number(r.laplacian.mean),
                          format_number(r.laplacian.std_error), format_number(r.laplacian_reference),
                          format_number(r.laplacian_z), format_number(r.degree.mean),
                          format_number(r.degree.std_error), format_number(r.poisson),
                          format_number(r.degree_z), format_number(r.adjacency.mean),
                          format_number(r.adjacency.std_error), format_number(q.right),
                          format_number(q.slack), format_number(q.combined_se),
                          q.holds ? "true" : "false"});
    }
    Record meta;
    meta.set("realizations_used", used);
    meta.set("flagged_realizations", join_flagged(run.flagged));
    write_csv(cfg.out_dir / "moments.csv", "moments", cfg, meta, t);

    auto& s = run.summary;
    const bool all_hold = std::all_of(run.rows.begin(), run.rows.end(),
                                      [](const MomentRow& r) { return r.inequality.holds; });
    s.set("status", "ok");
    s.set("realizations_used", used);
    s.set("k_max", static_cast<std::uint64_t>(kmax));
    s.set("degree_2", run.rows[0].degree.mean);
    s.set("laplacian_2", run.rows[0].laplacian.mean);
    s.set("ordering_holds", all_hold);
    write_summary(cfg.out_dir / "moments_summary.txt", "moments", cfg, s);
    return run;
}

// ---------------------------------------------------------------- verify

bool VerifyRun::ok() const {
    return std::all_of(properties.begin(), properties.end(),
                       [](const PropertyResult& p) { return !p.gating || p.violations == 0; });
}

namespace {

struct RealizationCheck {
    std::uint64_t clusters = 0;
    std::uint64_t nontrivial = 0;
    std::uint64_t over_cap = 0;
    std::uint64_t partition_bad = 0;
    std::uint64_t cheeger_bad = 0;
    std::uint64_t kernel_bad = 0;
    std::uint64_t ordering_checked = 0;
    std::uint64_t ordering_bad = 0;
    std::string partition_first, cheeger_first, kernel_first, ordering_first;
};

PropertyResult property(std::string name, bool gating = true) {
    PropertyResult p;
    p.name = std::move(name);
    p.gating = gating;
    return p;
}

void note(PropertyResult& p, bool violated, const std::string& instance) {
    ++p.checked;
    if (violated) {
        if (p.violations == 0) p.first_violation = instance;
        ++p.violations;
    }
}

std::vector<double> subcritical_grid() {
    std::vector<double> ps;
    for (int i = 1; i <= 19; ++i) ps.push_back(i / 20.0);
    return ps;
}

}  // namespace

VerifyRun run_verify(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto spec = cfg.graph_spec();
    std::vector<RealizationCheck> per(cfg.realizations);
    for_each_index(cfg.realizations, cfg.workers, [&](std::uint64_t r) {
        auto& out = per[r];
        const Graph g = sample_graph(spec, r);
        const ClusterDecomposition d = decompose(g);
        out.clusters = d.count();
        std::size_t vertex_total = 0, edge_total = 0;
        bool all_solved = true;
        std::vector<double> eigenvalues;
        for (const auto& c : d.clusters) {
            vertex_total += c.size();
            edge_total += c.edge_count();
            const auto& f = c.flags;
            const int classes = int(f.is_isolated) + int(f.is_tree && c.size() >= 2) + int(f.is_cyclic);
            if (classes != 1 || (f.is_linear_chain && !f.is_tree)) {
                if (out.partition_bad++ == 0) {
                    out.partition_first =
                        fmt::format("realization={} inconsistent flags {}", r, serialize_cluster(c));
                }
            }
            if (c.size() < 2) {
                eigenvalues.push_back(0.0);
                continue;
            }
            ++out.nontrivial;
            ClusterSpectrum cs;
            try {
                cs = eigenvalues_cluster(c);
            } catch (const EigensolveError&) {
                ++out.over_cap;
                all_solved = false;
                continue;
            }
            eigenvalues.insert(eigenvalues.end(), cs.eigenvalues.begin(), cs.eigenvalues.end());
            const double n = static_cast<double>(c.size());
            if (*cs.e_min < 1.0 / (n * n)) {
                if (out.cheeger_bad++ == 0) {
                    out.cheeger_first = fmt::format("realization={} size={} e_min={} bound={} {}", r,
                                                    c.size(), format_number(*cs.e_min),
                                                    format_number(1.0 / (n * n)), serialize_cluster(c));
                }
            }
        }
        if (vertex_total != g.n() || edge_total != g.edge_count()) {
            if (out.partition_bad++ == 0) {
                out.partition_first = fmt::format("realization={} vertices={} edges={} expected {} {}",
                                                  r, vertex_total, edge_total, g.n(), g.edge_count());
            }
        }
        if (!all_solved) return;
        const auto zeros = static_cast<std::size_t>(std::count(eigenvalues.begin(), eigenvalues.end(), 0.0));
        if (zeros != d.count()) {
            ++out.kernel_bad;
            out.kernel_first = fmt::format("realization={} zero_eigenvalues={} clusters={}", r, zeros, d.count());
        }
        // Tr L^{2k} <= 2^{2k-1} (Tr D^{2k} + Tr A^{2k}) holds for every graph.
        const auto deg = degree_sequence(g);
        for (int k = 1; k <= 2; ++k) {
            CompensatedSum lhs, dsum, asum;
            for (double l : eigenvalues) lhs.add(std::pow(l, 2 * k));
            for (auto x : deg) dsum.add(std::pow(static_cast<double>(x), 2 * k));
            for (const auto& c : d.clusters) {
                if (c.size() > 1) asum.add(adjacency_trace_power(c, 2 * k));
            }
            const double rhs = std::ldexp(1.0, 2 * k - 1) * (dsum.value() + asum.value());
            ++out.ordering_checked;
            if (lhs.value() > rhs * (1.0 + 1e-9)) {
                if (out.ordering_bad++ == 0) {
                    out.ordering_first = fmt::format("realization={} k={} trace_laplacian={} right_side={}",
                                                     r, k, format_number(lhs.value()), format_number(rhs));
                }
            }
        }
    });

    VerifyRun run;
    auto partition = property("cluster_partition");
    auto cheeger = property("cheeger");
    auto kernel = property("kernel_identity");
    auto ordering = property("moment_ordering_per_graph");
    auto over_cap = property("clusters_over_cap", false);
    for (std::uint64_t r = 0; r < cfg.realizations; ++r) {
        const auto& c = per[r];
        run.clusters_checked += c.clusters;
        partition.checked += c.clusters;
        cheeger.checked += c.clusters;
        ++kernel.checked;
        ordering.checked += c.ordering_checked;
        over_cap.checked += c.nontrivial;
        auto absorb = [](PropertyResult& p, std::uint64_t bad, const std::string& first) {
            if (bad && p.violations == 0) p.first_violation = first;
            p.violations += bad;
        };
        absorb(partition, c.partition_bad, c.partition_first);
        absorb(cheeger, c.cheeger_bad, c.cheeger_first);
        absorb(kernel, c.kernel_bad, c.kernel_first);
        absorb(ordering, c.ordering_bad, c.ordering_first);
        absorb(over_cap, c.over_cap, fmt::format("realization={}", r));
    }
    std::uint64_t nontrivial = 0;
    for (const auto& c : per) nontrivial += c.nontrivial;
    per.clear();
    for (auto* p : {&partition, &cheeger, &kernel, &ordering, &over_cap}) run.properties.push_back(*p);

    PropertyResult path = property("path_oracle");
    for (std::uint64_t n = 2; n <= 200; ++n) {
        Cluster c;
        for (std::uint32_t i = 0; i < n; ++i) c.vertices.push_back(i);
        for (std::uint32_t i = 0; i + 1 < n; ++i) c.edges.push_back({i, i + 1});
        c.flags = classify(c);
        const double e = *eigenvalues_cluster(c).e_min;
        const double ref = path_emin_reference(n);
        const double x = static_cast<double>(n);
        note(path, !(std::abs(e - ref) < 1e-9) || !(e <= 12.0 / (x * x)),
             fmt::format("n={} e_min={} reference={} ceiling={}", n, format_number(e), format_number(ref),
                         format_number(12.0 / (x * x))));
    }
    run.properties.push_back(path);

    PropertyResult norm = property("tau_normalization");
    for (double p : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        std::string instance;
        bool bad = false;
        try {
            const auto t = tau_normalization(p, cfg.tol);
            bad = !(std::abs(t.partial_sum - 1.0) < cfg.tol);
            instance = fmt::format("p={} partial_sum={} terms={}", p, format_number(t.partial_sum), t.n_used);
        } catch (const ConvergenceError& e) {
            bad = true;
            instance = fmt::format("p={} {}", p, e.what());
        }
        note(norm, bad, instance);
    }
    run.properties.push_back(norm);

    PropertyResult tail = property("tail_domination");
    PropertyResult tail_quoted = property("tail_domination_quoted_form", false);
    for (double p : subcritical_grid()) {
        for (std::uint64_t n = 1; n <= 1000; ++n) {
            const double lt = log_tau_n(p, n);
            const double lb = log_tau_tail_bound_stirling(p, n);
            const double lq = log_tau_tail_bound(p, n);
            note(tail, lt > lb, fmt::format("p={} n={} log_tau={} log_bound={}", p, n, format_number(lt),
                                            format_number(lb)));
            note(tail_quoted, lt > lq, fmt::format("p={} n={} log_tau={} log_bound={}", p, n,
                                                   format_number(lt), format_number(lq)));
        }
    }
    run.properties.push_back(tail);
    run.properties.push_back(tail_quoted);

    PropertyResult sandwich = property("bound_sandwich");
    for (double p : subcritical_grid()) {
        for (double e : geometric_grid(1e-5, 1.0, 100)) {
            const double u = upper_bound_U(e, p);
            const double l = lower_bound_L(e, p);
            if (u < 1.0 && l < 1.0) {
                note(sandwich, l > u, fmt::format("p={} E={} L={} U={}", p, format_number(e), format_number(l),
                                                  format_number(u)));
            }
        }
    }
    run.properties.push_back(sandwich);

    auto identity = property("decay_identity");
    auto replica = property("replica_window");
    for (int i = 1; i < 100; ++i) {
        const double p = i / 100.0;
        const double f = decay_f(p), F = decay_F(p), g = replica_g(p);
        note(identity, !(std::abs(F - f - 1.0) < 1e-14),
             fmt::format("p={} f={} F={}", p, format_number(f), format_number(F)));
        note(replica, !(f <= g && g <= kTwoSqrt3 * F),
             fmt::format("p={} f={} g={} ceiling={}", p, format_number(f), format_number(g),
                         format_number(kTwoSqrt3 * F)));
    }
    run.properties.push_back(identity);
    run.properties.push_back(replica);

    PropertyResult root = property("replica_root");
    for (double p : {1.5, 2.0, 3.0, 5.0}) {
        const double q = replica_Q(p);
        const double residual = std::abs(q - 1.0 + std::exp(-p * q));
        note(root, !(residual < 1e-12) || !(q > 0.0),
             fmt::format("p={} Q={} residual={}", p, format_number(q), format_number(residual)));
    }
    run.properties.push_back(root);

    PropertyResult limits = property("finite_n_limits");
    for (double p : {0.3, 0.5, 0.7}) {
        for (std::uint64_t m = 2; m <= 6; ++m) {
            double prev_lin = INFINITY, prev_tree = INFINITY;
            for (std::uint64_t n : {100ull, 1000ull, 10000ull, 100000ull}) {
                const double gl = std::abs(linear_prob_finite(n, p, m) - linear_prob_limit(p, m));
                const double gt = std::abs(tree_prob_finite(n, p, m) - tau_n(p, m));
                note(limits, !(gl < prev_lin) || !(gt < prev_tree),
                     fmt::format("p={} m={} N={} linear_gap={} tree_gap={}", p, m, n, format_number(gl),
                                 format_number(gt)));
                prev_lin = gl;
                prev_tree = gt;
            }
        }
    }
    run.properties.push_back(limits);

    CsvTable t{{"property", "gating", "checked", "violations"}, {}};
    std::string violations_text;
    for (const auto& p : run.properties) {
        t.rows.push_back({p.name, p.gating ? "true" : "false", std::to_string(p.checked),
                          std::to_string(p.violations)});
        if (p.violations) violations_text += p.name + ": " + p.first_violation + "\n";
    }
    write_csv(cfg.out_dir / "verify.csv", "verify", cfg, {}, t);
    if (!violations_text.empty()) {
        auto out = open_output(cfg.out_dir / "verify_violations.txt");
        out << violations_text;
        finish_output(out, cfg.out_dir / "verify_violations.txt");
    }

    auto& s = run.summary;
    s.set("status", run.ok() ? "pass" : "fail");
    s.set("clusters_checked", run.clusters_checked);
    s.set("nontrivial_clusters", nontrivial);
    for (const auto& p : run.properties) s.set(p.name + "_violations", p.violations);
    write_summary(cfg.out_dir / "verify_summary.txt", "verify", cfg, s);
    return run;
}

// ---------------------------------------------------------------- small commands

Record run_sample(const ExperimentConfig& cfg) {
    cfg.validate();
    const Graph g = sample_graph(cfg.graph_spec(), cfg.realization);
    const auto file = cfg.out_dir / "graph.txt";
    auto out = open_output(file);
    write_edge_list(out, g);
    finish_output(out, file);
    Record s;
    s.set("status", "ok");
    s.set("realization", cfg.realization);
    s.set("edges", static_cast<std::uint64_t>(g.edge_count()));
    s.set("clusters", static_cast<std::uint64_t>(decompose(g).count()));
    write_summary(cfg.out_dir / "sample_summary.txt", "sample", cfg, s);
    return s;
}

Record run_spectrum(const ExperimentConfig& cfg) {
    cfg.validate();
    const Graph g = sample_graph(cfg.graph_spec(), cfg.realization);
    const auto d = decompose(g);
    const auto spec = graph_spectrum(g, d);
    CsvTable t{{"eigenvalue"}, {}};
    for (double l : spec.eigenvalues) t.rows.push_back({format_number(l)});
    Record meta;
    meta.set("kernel_dim", static_cast<std::uint64_t>(spec.kernel_dim));
    write_csv(cfg.out_dir / "spectrum.csv", "spectrum", cfg, meta, t);
    Record s;
    s.set("status", "ok");
    s.set("realization", cfg.realization);
    s.set("kernel_dim", static_cast<std::uint64_t>(spec.kernel_dim));
    s.set("exact_zeros", static_cast<std::uint64_t>(spec.exact_zero_count()));
    s.set("largest", spec.eigenvalues.back());
    write_summary(cfg.out_dir / "spectrum_summary.txt", "spectrum", cfg, s);
    return s;
}

Record run_bounds(const ExperimentConfig& cfg) {
    cfg.validate();
    const double p = cfg.edge_prob;
    if (!subcritical(p)) throw ParameterError("bounds: p must lie in (0, 1)");
    const auto energies = cfg.grid.energies();
    const auto curve = make_bound_curve(p, energies);
    CsvTable t{{"E", "M", "L_staircase", "L_smooth", "U"}, {}};
    for (std::size_t i = 0; i < energies.size(); ++i) {
        t.rows.push_back({format_number(energies[i]), std::to_string(M_of_E(energies[i])),
                          format_number(curve.lower[i]), format_number(curve.lower_smooth[i]),
                          format_number(curve.upper[i])});
    }
    Record meta;
    meta.set("p", p);
    meta.set("formula_version", std::string(kFormulaVersion));
    meta.set("f", curve.f);
    meta.set("F", curve.F);
    meta.set("constant", zeta_three_halves_minus_one());
    if (p >= 0.99) meta.set("warning", "near-critical: slow convergence expected");
    write_csv(cfg.out_dir / "bound_curve.csv", "bounds", cfg, meta, t);
    Record s;
    s.set("status", "ok");
    s.set("points", static_cast<std::uint64_t>(energies.size()));
    s.set("f", curve.f);
    s.set("window_high", kTwoSqrt3 * curve.F);
    write_summary(cfg.out_dir / "bounds_summary.txt", "bounds", cfg, s);
    return s;
}

Record run_tau(const ExperimentConfig& cfg) {
    cfg.validate();
    const double p = cfg.edge_prob;
    if (!subcritical(p)) throw ParameterError("tau: p must lie in (0, 1)");
    const auto table = make_tau_table(p, cfg.n_max);
    CsvTable t{{"n", "tau", "tail_bound", "tail_bound_stirling", "partial_sum"}, {}};
    std::uint64_t quoted_below = 0;
    for (std::size_t i = 0; i < table.tau.size(); ++i) {
        if (table.tau[i] > table.tail_bound[i]) ++quoted_below;
        t.rows.push_back({std::to_string(i + 1), format_number(table.tau[i]),
                          format_number(table.tail_bound[i]), format_number(table.tail_bound_stirling[i]),
                          format_number(table.partial_sum[i])});
    }
    Record meta;
    meta.set("p", p);
    meta.set("formula_version", std::string(kFormulaVersion));
    meta.set("f", decay_f(p));
    write_csv(cfg.out_dir / "tau_table.csv", "tau", cfg, meta, t);
    Record s;
    s.set("status", "ok");
    s.set("n_max", cfg.n_max);
    s.set("partial_sum", table.partial_sum.back());
    s.set("tau_above_quoted_tail_bound", quoted_below);
    write_summary(cfg.out_dir / "tau_summary.txt", "tau", cfg, s);
    return s;
}

}  // namespace erlap
