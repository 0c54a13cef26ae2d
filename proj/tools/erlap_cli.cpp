#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "erlap/harness.hpp"
#include "erlap/parallel.hpp"

using namespace erlap;

namespace {

struct Flags {
    std::optional<std::uint64_t> n, reps, seed, nmax, r;
    std::optional<double> p, emin, emax, tol;
    std::optional<std::size_t> points;
    std::optional<unsigned> workers;
    std::optional<int> kmax;
    std::vector<double> grid;
    bool linear = false;
    std::string out;
    std::string config;
};

void add_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--n", f.n, "number of vertices N");
    sub->add_option("--p", f.p, "mean degree p (edge probability p/N)");
    sub->add_option("--reps", f.reps, "number of realizations R");
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--workers", f.workers, "worker threads");
    sub->add_option("--emin", f.emin, "smallest grid energy");
    sub->add_option("--emax", f.emax, "largest grid energy");
    sub->add_option("--points", f.points, "grid points");
    sub->add_option("--grid", f.grid, "explicit energy list")->delimiter(',');
    sub->add_flag("--linear", f.linear, "linear instead of geometric grid");
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--config", f.config, "key=value config file; flags override it");
    sub->add_option("--nmax", f.nmax, "largest cluster size tabulated");
    sub->add_option("--kmax", f.kmax, "largest moment index k (2k <= 8)");
    sub->add_option("--r", f.r, "realization index for sample and spectrum");
    sub->add_option("--tol", f.tol, "tau normalization tolerance");
}

ExperimentConfig build_config(const Flags& f) {
    ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : ExperimentConfig::load(f.config);
    if (f.config.empty()) c.workers = default_workers();
    if (f.n) c.n_vertices = *f.n;
    if (f.p) c.edge_prob = *f.p;
    if (f.reps) c.realizations = *f.reps;
    if (f.seed) c.master_seed = *f.seed;
    if (f.workers) c.workers = *f.workers;
    if (f.emin) c.grid.e_min = *f.emin;
    if (f.emax) c.grid.e_max = *f.emax;
    if (f.points) c.grid.points = *f.points;
    if (f.linear) c.grid.kind = GridKind::linear;
    if (!f.grid.empty()) {
        c.grid.kind = GridKind::list;
        c.grid.values = f.grid;
    }
    if (!f.out.empty()) c.out_dir = f.out;
    if (f.nmax) c.n_max = *f.nmax;
    if (f.kmax) c.k_max = *f.kmax;
    if (f.r) c.realization = *f.r;
    if (f.tol) c.tol = *f.tol;
    c.validate();
    return c;
}

void print_summary(const std::string& command, const Record& summary) {
    std::cout << "erlap command=" << command << ' ' << summary.line() << '\n';
}

int dispatch(const std::string& command, const ExperimentConfig& cfg) {
    if (command == "ids") {
        const auto run = run_ids(cfg);
        for (const auto& w : run.bounds.warnings) std::cerr << "warning: " << w << '\n';
        print_summary(command, run.summary);
        return 0;
    }
    if (command == "census") {
        print_summary(command, run_census(cfg).summary);
        return 0;
    }
    if (command == "lifshitz") {
        const auto run = run_lifshitz(cfg);
        print_summary(command, run.summary);
        if (!run.fit) {
            std::cerr << "error: " << run.fit_failure << '\n';
            return 1;
        }
        return 0;
    }
    if (command == "moments") {
        print_summary(command, run_moments(cfg).summary);
        return 0;
    }
    if (command == "verify") {
        const auto run = run_verify(cfg);
        for (const auto& p : run.properties) {
            if (p.violations) {
                std::cerr << (p.gating ? "violation " : "note ") << p.name << " (" << p.violations
                          << " of " << p.checked << "): " << p.first_violation << '\n';
            }
        }
        print_summary(command, run.summary);
        return run.ok() ? 0 : 1;
    }
    Record s;
    if (command == "sample") s = run_sample(cfg);
    else if (command == "spectrum") s = run_spectrum(cfg);
    else if (command == "bounds") s = run_bounds(cfg);
    else if (command == "tau") s = run_tau(cfg);
    print_summary(command, s);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Laplacian spectra of sparse Erdos-Renyi graphs"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"sample", "write one realization as an edge list"},
        {"census", "cluster-size census against the exact densities"},
        {"spectrum", "eigenvalues of one realization"},
        {"ids", "integrated density of states and bound report"},
        {"lifshitz", "Lifshitz exponent regression"},
        {"bounds", "analytic lower and upper bound curves"},
        {"tau", "cluster-size distribution table"},
        {"moments", "spectral and degree moments"},
        {"verify", "run the property suite"},
    };
    for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
            std::cerr << '\n' << sub->help();
        }
        return 2;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const auto cfg = build_config(flags);
        return dispatch(command, cfg);
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        std::cout << "erlap command=" << command << " status=invalid_arguments\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        std::cout << "erlap command=" << command << " status=error\n";
        return 1;
    }
}
