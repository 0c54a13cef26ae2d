#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "erlap/harness.hpp"

using namespace erlap;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("erlap_test_harness_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig small_config(const fs::path& out) {
    ExperimentConfig c;
    c.n_vertices = 1000;
    c.edge_prob = 0.5;
    c.realizations = 10;
    c.master_seed = 42;
    c.out_dir = out;
    return c;
}

}  // namespace

TEST_CASE("config round trip") {
    ExperimentConfig c;
    c.n_vertices = 12345;
    c.edge_prob = 0.1 + 0.2;  // not exactly representable as a short decimal
    c.realizations = 7;
    c.master_seed = 18446744073709551615ull;
    c.grid.kind = GridKind::list;
    c.grid.values = {1e-3, 0.1 / 3.0, 0.7};
    c.workers = 3;
    c.out_dir = "some/dir";
    c.n_max = 99;
    c.k_max = 3;
    c.tol = 1e-11;
    c.realization = 5;
    CHECK(ExperimentConfig::from_text(c.to_text()) == c);

    const auto dir = scratch("config");
    c.save(dir / "run.cfg");
    CHECK(ExperimentConfig::load(dir / "run.cfg") == c);

    CHECK(ExperimentConfig::from_text("") == ExperimentConfig{});
    CHECK(ExperimentConfig::from_text("# comment\n\n  edge_prob = 0.25 \n").edge_prob == 0.25);
    CHECK_THROWS_AS(ExperimentConfig::from_text("colour=blue\n"), ParameterError);
    CHECK_THROWS_AS(ExperimentConfig::from_text("edge_prob=0.5\nedge_prob=0.6\n"), ParameterError);
    CHECK_THROWS_AS(ExperimentConfig::from_text("edge_prob=half\n"), ParameterError);
    CHECK_THROWS_AS(ExperimentConfig::from_text("n_vertices=-3\n"), ParameterError);
    CHECK_THROWS_AS(ExperimentConfig::from_text("grid=spiral\n"), ParameterError);
    CHECK_THROWS_AS(ExperimentConfig::from_text("no equals sign\n"), ParameterError);
}

TEST_CASE("config validation") {
    ExperimentConfig c;
    CHECK_NOTHROW(c.validate());
    auto bad = [&](auto mutate) {
        ExperimentConfig x;
        mutate(x);
        CHECK_THROWS_AS(x.validate(), ParameterError);
    };
    bad([](ExperimentConfig& x) { x.n_vertices = 1; });
    bad([](ExperimentConfig& x) { x.edge_prob = 0.0; });
    bad([](ExperimentConfig& x) { x.edge_prob = NAN; });
    bad([](ExperimentConfig& x) { x.realizations = 0; });
    bad([](ExperimentConfig& x) { x.grid.e_min = 0.6; });
    bad([](ExperimentConfig& x) { x.grid.points = 1; });
    bad([](ExperimentConfig& x) {
        x.grid.kind = GridKind::list;
        x.grid.values = {0.2, 0.1};
    });
    bad([](ExperimentConfig& x) { x.workers = 0; });
    bad([](ExperimentConfig& x) { x.k_max = 5; });
    bad([](ExperimentConfig& x) { x.tol = 0.0; });
}

TEST_CASE("config echo omits run-only settings") {
    ExperimentConfig a;
    ExperimentConfig b;
    b.workers = 8;
    b.out_dir = "elsewhere";
    CHECK(a.echo() == b.echo());
    for (const auto& [k, v] : a.echo()) {
        CHECK(k != "workers");
        CHECK(k != "out_dir");
    }
}

TEST_CASE("records and number formatting") {
    Record r;
    r.set("a", 1.5).set("b", std::uint64_t{3}).set("c", std::optional<double>{}).set("a", "x");
    CHECK(r.line() == "a=x b=3 c=NA");
    REQUIRE(r.find("b") != nullptr);
    CHECK(*r.find("b") == "3");
    CHECK(r.find("z") == nullptr);
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(NAN) == "NA");
    for (double x : {1.0 / 3.0, 1e-300, 6.02214076e23, -0.0625}) {
        CHECK(std::stod(format_number(x)) == x);
    }
}

TEST_CASE("csv layout") {
    const auto dir = scratch("csv");
    ExperimentConfig c;
    Record extra;
    extra.set("note", "x");
    write_csv(dir / "t.csv", "demo", c, extra, {{"a", "b"}, {{"1", "2"}, {"3", "NA"}}});
    const auto text = slurp(dir / "t.csv");
    CHECK(text.find('\r') == std::string::npos);
    CHECK(text.rfind("# format_version=erlap-1\n", 0) == 0);
    CHECK(text.find("# build_tag=") != std::string::npos);
    CHECK(text.find("# master_seed=1\n") != std::string::npos);
    CHECK(text.find("# note=x\na,b\n1,2\n3,NA\n") != std::string::npos);
    CHECK_THROWS(write_csv(dir / "u.csv", "demo", c, {}, {{"a", "b"}, {{"1"}}}));
}

TEST_CASE("lifshitz fit on exact curves") {
    // value = exp(-c E^{-a}) gives ln|ln value| = ln c - a ln E exactly.
    std::vector<FitPoint> pts;
    for (double e : geometric_grid(0.01, 0.5, 9)) pts.push_back({e, std::exp(-0.7 * std::pow(e, -0.5)), {}});
    const auto ols = fit_lifshitz(pts);
    CHECK_FALSE(ols.weighted);
    CHECK(ols.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(ols.intercept == doctest::Approx(std::log(0.7)).epsilon(1e-12));
    CHECK(ols.slope_se < 1e-10);

    for (auto& p : pts) p.std_error = p.value * 1e-3;
    const auto wls = fit_lifshitz(pts);
    CHECK(wls.weighted);
    CHECK(wls.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(wls.slope_se > 0.0);

    // noise floor and sign exclusions, then too few points
    std::vector<FitPoint> sparse = pts;
    sparse[0].std_error = sparse[0].value;
    sparse[1].value = -1e-9;
    const auto partial = fit_lifshitz(sparse);
    CHECK(partial.used.size() == pts.size() - 2);
    REQUIRE(partial.excluded.size() == 2);
    CHECK(partial.excluded[0].reason == "below noise floor");
    CHECK(partial.excluded[1].reason == "nonpositive value");

    std::vector<FitPoint> three(pts.begin(), pts.begin() + 3);
    three.push_back({0.9, 0.0, 1e-4});
    try {
        fit_lifshitz(three);
        FAIL("expected FitError");
    } catch (const FitError& e) {
        const std::string what = e.what();
        CHECK(what.find("at least 4") != std::string::npos);
        CHECK(what.find("E=0.9") != std::string::npos);
    }
}

TEST_CASE("anchor fits on the analytic bounds") {
    const auto a = anchor_fits(0.5);
    CHECK(std::abs(a.upper.slope + 0.5) < 0.03);
    CHECK(std::abs(a.lower_smooth.slope + 0.5) < 0.03);
    CHECK(a.upper.used.size() == kAnchorPoints);
    CHECK_THROWS_AS(anchor_fits(1.2), ParameterError);
}

TEST_CASE("bounds report flags") {
    IdsEstimate ids;
    ids.edge_prob = 0.5;
    ids.energies = {0.1, 0.2, 0.3, 0.6};
    ids.delta_hat = {{1e-4, 1e-4, 10}, {0.0, 0.0, 10}, {1e-3, 1e-5, 10}, {0.05, 1e-4, 10}};
    const auto b = make_bounds_report(ids);
    REQUIRE(b.rows.size() == 4);
    CHECK(b.rows[0].status == "empirical_below_noise_floor");
    CHECK(b.rows[1].status == "empirical_below_noise_floor");
    CHECK_FALSE(b.rows[1].rescaled.has_value());
    CHECK(b.rows[2].status == "in_window");
    CHECK(*b.rows[2].rescaled == doctest::Approx(-std::log(1e-3) * std::sqrt(0.3)));
    CHECK(b.rows[3].status == "above_energy_gate");
    CHECK(b.gated_count() == 1);
    CHECK(b.warnings.empty());
    CHECK(*b.replica == doctest::Approx(0.49012907173427359586));

    ids.edge_prob = 0.99;
    const auto near = make_bounds_report(ids);
    CHECK(near.near_critical);
    CHECK(near.bounds_available);
    CHECK(near.warnings.at(0) == "near-critical: slow convergence expected");

    ids.edge_prob = 1.5;
    const auto super = make_bounds_report(ids);
    CHECK_FALSE(super.bounds_available);
    CHECK_FALSE(super.rows[2].upper.has_value());
    CHECK(super.rows[2].status == "no_bounds");
    CHECK(super.warnings.at(0) == "bounds omitted: p outside (0, 1)");
}

TEST_CASE("ids run is byte-identical across repeats and worker counts") {
    auto cfg = small_config(scratch("ids_a"));
    cfg.workers = 1;
    const auto first = run_ids(cfg);
    const auto a_ids = slurp(cfg.out_dir / "ids.csv");
    const auto a_bounds = slurp(cfg.out_dir / "bounds.csv");
    run_ids(cfg);
    CHECK(slurp(cfg.out_dir / "ids.csv") == a_ids);

    cfg.out_dir = scratch("ids_b");
    cfg.workers = 4;
    run_ids(cfg);
    CHECK(slurp(cfg.out_dir / "ids.csv") == a_ids);
    CHECK(slurp(cfg.out_dir / "bounds.csv") == a_bounds);
    CHECK(first.ids.realizations == 10);
    CHECK(*first.summary.find("status") == "ok");
}

TEST_CASE("census run") {
    auto cfg = small_config(scratch("census_a"));
    cfg.realizations = 20;
    const auto run = run_census(cfg);
    REQUIRE_FALSE(run.rows.empty());
    CHECK(run.rows[0].tau_exact.has_value());
    CHECK(run.rows[0].tau_se.has_value());
    CHECK_FALSE(run.rows[0].linear_finite.has_value());
    const auto table = slurp(cfg.out_dir / "census.csv");
    const auto chains = slurp(cfg.out_dir / "vertex0_chains.csv");
    cfg.out_dir = scratch("census_b");
    cfg.workers = 3;
    run_census(cfg);
    CHECK(slurp(cfg.out_dir / "census.csv") == table);
    CHECK(slurp(cfg.out_dir / "vertex0_chains.csv") == chains);
}

TEST_CASE("census with a single realization reports no standard errors") {
    auto cfg = small_config(scratch("census_r1"));
    cfg.realizations = 1;
    const auto run = run_census(cfg);
    REQUIRE_FALSE(run.rows.empty());
    for (const auto& r : run.rows) {
        CHECK_FALSE(r.tau_se.has_value());
        CHECK_FALSE(r.tau_z.has_value());
    }
    const auto text = slurp(cfg.out_dir / "census.csv");
    CHECK(text.find(",NA,") != std::string::npos);
    CHECK(run.rows[0].tau_hat > 0.0);
}

TEST_CASE("moments run") {
    auto cfg = small_config(scratch("moments"));
    cfg.k_max = 2;
    const auto run = run_moments(cfg);
    REQUIRE(run.rows.size() == 2);
    CHECK(run.rows[0].inequality.holds);
    CHECK(run.rows[1].inequality.holds);
    CHECK(run.rows[0].laplacian_reference.has_value());
    // Tr L^2 = Tr D^2 + Tr A^2 on every graph, so also for the means.
    const double mean_degree = 0.5 * 999.0 / 1000.0;
    CHECK(run.rows[0].laplacian.mean ==
          doctest::Approx(run.rows[0].degree.mean + run.rows[0].adjacency.mean).epsilon(1e-12));
    CHECK(std::abs(run.rows[0].adjacency.mean - mean_degree) < 0.05);
}

TEST_CASE("verify run passes on a small ensemble") {
    auto cfg = small_config(scratch("verify"));
    const auto run = run_verify(cfg);
    CHECK(run.ok());
    CHECK(run.clusters_checked > 5000);
    for (const auto& p : run.properties) {
        if (p.gating) CHECK_MESSAGE(p.violations == 0, p.name);
        CHECK(p.checked > 0);
    }
    CHECK(*run.summary.find("status") == "pass");
}

TEST_CASE("small commands") {
    auto cfg = small_config(scratch("small"));
    cfg.realization = 3;
    run_sample(cfg);
    std::ifstream g(cfg.out_dir / "graph.txt");
    CHECK(read_edge_list(g) == sample_graph(cfg.graph_spec(), 3));
    const auto s = run_spectrum(cfg);
    CHECK(*s.find("kernel_dim") == *s.find("exact_zeros"));
    cfg.n_max = 50;
    const auto t = run_tau(cfg);
    CHECK(std::stod(*t.find("partial_sum")) == doctest::Approx(make_tau_table(0.5, 50).partial_sum.back()));
    cfg.grid = {GridKind::geometric, 0.001, 1.0, 40, {}};
    run_bounds(cfg);
    const auto curve = slurp(cfg.out_dir / "bound_curve.csv");
    CHECK(curve.find("# formula_version=") != std::string::npos);
    CHECK(curve.find("# p=0.5\n") != std::string::npos);
    cfg.edge_prob = 1.5;
    CHECK_THROWS_AS(run_tau(cfg), ParameterError);
    CHECK_THROWS_AS(run_bounds(cfg), ParameterError);
}
