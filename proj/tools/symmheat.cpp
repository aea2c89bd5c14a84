// symmheat command-line driver.
//
// Verbs:
//   run <config>       execute the scenarios of a JSON config
//   sweep <config>     refinement sweeps of the flagged scenarios
//   selftest           the embedded acceptance suite
//   list-presets       bundled configs, domain kinds and source presets
//
// Exit codes: 0 all verdicts pass, 1 verification/solver failure,
// 2 configuration error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symmheat/bundled_configs.hpp"
#include "symmheat/scenario.hpp"
#include "symmheat/selftest.hpp"

namespace {

std::string default_out_root() {
    if (const char* env = std::getenv("SYMMHEAT_OUT")) return env;
    return "symmheat_out";
}

// The summary-first contract covers early configuration failures too.
void write_error_summary(const std::filesystem::path& out_dir, const std::string& status,
                         int exit_code, const std::string& diagnostic) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) return;
    symmheat::Json s;
    s["status"] = status;
    s["exit_code"] = exit_code;
    s["diagnostic"] = diagnostic;
    std::ofstream f(out_dir / "summary.json");
    f << s.dump(2) << '\n';
}

int run_or_sweep(const std::string& config_path, const symmheat::RunOptions& options,
                 bool is_sweep) {
    try {
        symmheat::SuiteConfig suite = symmheat::parse_suite_file(config_path);
        symmheat::RunResult result = is_sweep ? symmheat::sweep_suite(suite, options)
                                              : symmheat::run_suite(suite, options);
        return result.exit_code;
    } catch (const symmheat::ConfigError& e) {
        write_error_summary(options.out_dir, "config_error", 2, e.what());
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const symmheat::SolverError& e) {
        write_error_summary(options.out_dir, "solver_failure", 1, e.what());
        std::cerr << e.what() << "\n";
        return 1;
    }
}

void list_presets(const std::string& dump) {
    using namespace symmheat;
    if (!dump.empty()) {
        std::cout << bundled::text(dump) << "\n";
        return;
    }
    std::cout << "bundled configs (dump with: symmheat list-presets --dump <name>):\n";
    for (const auto& [name, _] : bundled::all()) std::cout << "  " << name << "\n";
    std::cout <<
        "\ndomain kinds:\n"
        "  flat_rectangle (width, height, nx, ny)\n"
        "  flat_lshape    (width, height, nx, ny; even cell counts)\n"
        "  flat_mask      (shape disc|ellipse|annulus, center, radius/radii/r_inner+r_outer, nx, ny)\n"
        "  polar_disc     (radius, nr, nphi)\n"
        "  polar_annulus  (r_inner, r_outer, nr, nphi, inner_dirichlet)\n"
        "  cone_polar     (total_angle, radius, nr, nphi) -- theta = total_angle / 2 pi\n"
        "  sphere_latlong (shape cap|band|mask, cap_radius/r_inner+r_outer, nr, nphi; kappa > 0)\n"
        "\nsource presets (f, g):\n"
        "  <number>                        constant\n"
        "  \"<expression>\"                  formula over x, y, r (sin cos exp pow min max, ^)\n"
        "  {kind: constant, value}\n"
        "  {kind: expression, expr}\n"
        "  {kind: gaussian, center, width, amplitude}\n"
        "  {kind: eigenmode}               first Dirichlet mode / smooth radial bump\n"
        "  {kind: radial_poly, coeffs}\n"
        "  {kind: indicator, shape disc|box, ...}\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symmheat: heat-equation symmetrization comparison lab"};
    app.require_subcommand(1);
    app.fallthrough();  // --out/--threads/--quiet may follow the verb

    std::string out_dir = default_out_root();
    int threads = 1;
    bool quiet = false;
    app.add_option("--out", out_dir, "output directory (default: $SYMMHEAT_OUT or symmheat_out)");
    app.add_option("--threads", threads, "scenario-level parallelism (default 1, deterministic)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--quiet", quiet, "suppress per-scenario progress lines");

    std::string run_config, sweep_config;
    CLI::App* run_cmd = app.add_subcommand("run", "execute the scenarios of a config");
    run_cmd->add_option("config", run_config, "JSON config path")->required();
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "refinement sweeps of flagged scenarios");
    sweep_cmd->add_option("config", sweep_config, "JSON config path")->required();

    CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the embedded acceptance suite");
    std::string suite_override, fault;
    std::vector<int> only;
    selftest_cmd->add_option("--suite", suite_override,
                             "override the bundled certification suite (testing hook)");
    selftest_cmd->add_option("--fault", fault,
                             "inject a verification fault (testing hook; route_v)");
    selftest_cmd->add_option("--only", only, "run only the listed criteria (1..8)");

    CLI::App* list_cmd = app.add_subcommand("list-presets", "bundled configs and presets");
    std::string dump;
    list_cmd->add_option("--dump", dump, "print a bundled config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // command-line misuse is a configuration error
    }

    symmheat::RunOptions options;
    options.out_dir = out_dir;
    options.threads = threads;
    options.quiet = quiet;

    if (run_cmd->parsed()) return run_or_sweep(run_config, options, false);
    if (sweep_cmd->parsed()) return run_or_sweep(sweep_config, options, true);
    if (selftest_cmd->parsed()) {
        symmheat::selftest::Options so;
        so.out_dir = options.out_dir;
        so.threads = threads;
        so.quiet = quiet;
        so.fault = fault;
        so.suite_path = suite_override;
        so.only = only;
        try {
            auto results = symmheat::selftest::run_all(so);
            return symmheat::selftest::exit_code(results);
        } catch (const symmheat::ConfigError& e) {
            std::cerr << e.what() << "\n";
            return 2;
        } catch (const symmheat::SolverError& e) {
            std::cerr << e.what() << "\n";
            return 1;
        }
    }
    if (list_cmd->parsed()) {
        try {
            list_presets(dump);
        } catch (const std::out_of_range& e) {
            std::cerr << e.what() << "\n";
            return 2;
        }
        return 0;
    }
    return 2;
}
