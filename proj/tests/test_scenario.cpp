#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>

#include "symmheat/bundled_configs.hpp"
#include "symmheat/scenario.hpp"

using namespace symmheat;

namespace {

const char* kQuickScenario = R"json({
  "scenarios": [
    {"name": "quick_disc",
     "domain": {"kind": "polar_disc", "radius": 1.0, "nr": 24, "nphi": 12},
     "f": 1.0, "g": 0.0, "dt": 0.005, "times": [0.05, 0.2],
     "a_cells": 32, "radial_cells": 64}
  ]
})json";

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::filesystem::path temp_dir(const std::string& tag) {
    auto p = std::filesystem::temp_directory_path() / ("symmheat_test_" + tag);
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("config parsing fills defaults and normalizes theta") {
    SuiteConfig suite = parse_suite_text(kQuickScenario);
    REQUIRE(suite.scenarios.size() == 1);
    const ScenarioConfig& c = suite.scenarios[0];
    CHECK(c.theta == 1.0);
    CHECK(c.a_cells == 32);
    CHECK(c.tolerance_rel == Approx(1e-2));
    CHECK_FALSE(c.tolerance_abs.has_value());
    CHECK(c.solver.preconditioner == Preconditioner::Auto);

    // Default schedule is geometric 0.005 .. 2.56.
    SuiteConfig dflt = parse_suite_text(R"({"scenarios": [{"name": "d",
        "domain": {"kind": "flat_rectangle", "nx": 8, "ny": 8}, "f": 0.0, "g": 0.0}]})");
    REQUIRE(dflt.scenarios[0].times.size() == 10);
    CHECK(dflt.scenarios[0].times.front() == Approx(0.005));
    CHECK(dflt.scenarios[0].times.back() == Approx(2.56));
}

TEST_CASE("config validation rejects inconsistent scenarios") {
    auto parse_one = [](const std::string& body) {
        return parse_suite_text(R"({"scenarios": [)" + body + "]}");
    };
    // kappa > 0 without a sphere domain
    CHECK_THROWS_AS(parse_one(R"({"name": "x", "kappa": 1.0,
        "domain": {"kind": "flat_rectangle", "nx": 8, "ny": 8}, "f": 0, "g": 0})"),
                    ConfigError);
    // theta must match the cone angle
    CHECK_THROWS_AS(parse_one(R"({"name": "x", "theta": 0.3,
        "domain": {"kind": "cone_polar", "total_angle": 3.141592653589793,
                   "radius": 1.0, "nr": 8, "nphi": 8}, "f": 0, "g": 0})"),
                    ConfigError);
    // theta != 1 on a flat non-cone domain
    CHECK_THROWS_AS(parse_one(R"({"name": "x", "theta": 0.5,
        "domain": {"kind": "flat_rectangle", "nx": 8, "ny": 8}, "f": 0, "g": 0})"),
                    ConfigError);
    // unknown field
    CHECK_THROWS_AS(parse_one(R"({"name": "x", "bogus": 1,
        "domain": {"kind": "flat_rectangle", "nx": 8, "ny": 8}, "f": 0, "g": 0})"),
                    ConfigError);
    // equality flag on a non-ball scenario
    CHECK_THROWS_AS(parse_one(R"({"name": "x", "equality_case": true,
        "domain": {"kind": "flat_rectangle", "nx": 8, "ny": 8}, "f": 0, "g": 0})"),
                    ConfigError);
    // n != 2
    CHECK_THROWS_AS(parse_one(R"({"name": "x", "n": 3,
        "domain": {"kind": "flat_rectangle", "nx": 8, "ny": 8}, "f": 0, "g": 0})"),
                    ConfigError);
    // duplicate names
    CHECK_THROWS_AS(parse_suite_text(R"({"scenarios": [
        {"name": "a", "domain": {"kind": "flat_rectangle", "nx": 8, "ny": 8}, "f": 0, "g": 0},
        {"name": "a", "domain": {"kind": "flat_rectangle", "nx": 8, "ny": 8}, "f": 0, "g": 0}
    ]})"),
                    ConfigError);
    // invalid JSON
    CHECK_THROWS_AS(parse_suite_text("{nope"), ConfigError);
    // diagnostics carry the field path
    try {
        parse_one(R"({"name": "x", "dt": -1.0,
            "domain": {"kind": "flat_rectangle", "nx": 8, "ny": 8}, "f": 0, "g": 0})");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "scenarios[0].dt");
    }
}

TEST_CASE("normalized config round-trips to an equal value") {
    for (const char* text : {kQuickScenario, bundled::kEqualityCases, bundled::kRefinementSweeps,
                             bundled::kDemo}) {
        SuiteConfig suite = parse_suite_text(text);
        Json normalized = suite_to_json(suite);
        SuiteConfig reparsed = parse_suite(normalized);
        CHECK(suite_to_json(reparsed) == normalized);
    }
    // The certification suite parses cleanly too (run separately by the
    // acceptance binary).
    SuiteConfig acc = parse_suite_text(bundled::text("acceptance_suite"));
    CHECK(acc.scenarios.size() == 18);
    CHECK(suite_to_json(parse_suite(suite_to_json(acc))) == suite_to_json(acc));
}

TEST_CASE("run_scenario produces a passing report on a quick disc case") {
    SuiteConfig suite = parse_suite_text(kQuickScenario);
    ScenarioOutcome o = run_scenario(suite.scenarios[0]);
    CHECK(o.pass);
    CHECK(o.report.global_max_gap <= o.report.tolerance);
    CHECK(o.report.lp_pass());
    CHECK(o.t0_identity_error <= 1e-12);
    CHECK(o.shape_violation <= 1e-10 * std::max(o.report.max_U, o.report.max_V));
    CHECK(o.mesh_volume == Approx(kPi).epsilon(1e-10));
    CHECK(o.report.lp_gaps.size() == 2 * 3);
    CHECK_FALSE(o.report.dmp_warning);
}

TEST_CASE("run_suite writes artifacts, summary and honors the exit contract") {
    auto out = temp_dir("run");
    SuiteConfig suite = parse_suite_text(kQuickScenario);
    RunOptions opts;
    opts.out_dir = out;
    opts.quiet = true;
    RunResult result = run_suite(suite, opts);
    CHECK(result.exit_code == 0);
    CHECK(result.status == "pass");
    CHECK(std::filesystem::exists(out / "summary.json"));
    CHECK(std::filesystem::exists(out / "config.json"));
    CHECK(std::filesystem::exists(out / "quick_disc_comparison.csv"));
    CHECK(std::filesystem::exists(out / "quick_disc_lp.csv"));

    const std::string csv = slurp(out / "quick_disc_comparison.csv");
    CHECK(csv.rfind("t,a,U,V,V_minus_U\n", 0) == 0);
    const std::string lp = slurp(out / "quick_disc_lp.csv");
    CHECK(lp.rfind("t,p,lhs,rhs,gap\n", 0) == 0);
    CHECK(lp.find("inf") != std::string::npos);

    Json summary = Json::parse(slurp(out / "summary.json"));
    CHECK(summary["status"] == "pass");
    CHECK(summary["scenarios"].size() == 1);
    CHECK(summary["scenarios"][0]["verdict"] == "pass");

    // The echoed config re-parses to an equal value.
    SuiteConfig echoed = parse_suite(Json::parse(slurp(out / "config.json")));
    CHECK(suite_to_json(echoed) == suite_to_json(suite));

    // Tightened tolerance flips the verdict and the exit code.
    SuiteConfig tight = suite;
    tight.scenarios[0].tolerance_abs = 1e-9;
    auto out2 = temp_dir("tight");
    opts.out_dir = out2;
    RunResult r2 = run_suite(tight, opts);
    CHECK(r2.exit_code == 1);
    CHECK(r2.status == "fail");
    Json s2 = Json::parse(slurp(out2 / "summary.json"));
    CHECK(s2["status"] == "fail");
    CHECK(s2["scenarios"][0]["verdict"] == "fail");
    // The offending location is reported.
    CHECK(s2["scenarios"][0].contains("reason"));

    // Negative source: config error, summary still written first.
    SuiteConfig bad = suite;
    bad.scenarios[0].g = SourceSpec::expression("x - 10");
    auto out3 = temp_dir("bad");
    opts.out_dir = out3;
    RunResult r3 = run_suite(bad, opts);
    CHECK(r3.exit_code == 2);
    CHECK(r3.status == "config_error");
    CHECK(std::filesystem::exists(out3 / "summary.json"));
    Json s3 = Json::parse(slurp(out3 / "summary.json"));
    CHECK(s3["diagnostic"].get<std::string>().find(".g") != std::string::npos);
}

TEST_CASE("identical config produces bitwise-identical CSV output") {
    SuiteConfig suite = parse_suite_text(kQuickScenario);
    RunOptions opts;
    opts.quiet = true;
    auto out1 = temp_dir("det1"), out2 = temp_dir("det2");
    opts.out_dir = out1;
    run_suite(suite, opts);
    opts.out_dir = out2;
    run_suite(suite, opts);
    CHECK(slurp(out1 / "quick_disc_comparison.csv") == slurp(out2 / "quick_disc_comparison.csv"));
    CHECK(slurp(out1 / "quick_disc_lp.csv") == slurp(out2 / "quick_disc_lp.csv"));
    CHECK(slurp(out1 / "config.json") == slurp(out2 / "config.json"));
}

TEST_CASE("sweep on a quick equality disc shrinks the gaps") {
    const char* text = R"json({
      "scenarios": [
        {"name": "quick_sweep",
         "domain": {"kind": "polar_disc", "radius": 1.0, "nr": 8, "nphi": 16},
         "f": 1.0, "g": 0.0, "dt": 0.02, "times": [0.08, 0.24],
         "a_cells": 32, "radial_cells": 256,
         "equality_case": true, "refinement_sweep": true}
      ]
    })json";
    SuiteConfig suite = parse_suite_text(text);
    auto out = temp_dir("sweep");
    RunOptions opts;
    opts.out_dir = out;
    opts.quiet = true;
    RunResult result = sweep_suite(suite, opts);
    CHECK(result.exit_code == 0);
    REQUIRE(result.sweeps.size() == 1);
    REQUIRE(result.sweeps[0].levels.size() == 3);
    const auto& lv = result.sweeps[0].levels;
    CHECK(lv[1].equality_gap < lv[0].equality_gap);
    CHECK(lv[2].equality_gap < lv[1].equality_gap);
    CHECK(std::filesystem::exists(out / "quick_sweep_sweep.csv"));
    const std::string csv = slurp(out / "quick_sweep_sweep.csv");
    CHECK(csv.rfind("level,h,dt,max_gap_pos,equality_gap\n", 0) == 0);

    // Zero-data sweeps pass trivially.
    SuiteConfig zero = suite;
    zero.scenarios[0].f = SourceSpec::constant(0.0);
    zero.scenarios[0].name = "zero_sweep";
    auto out2 = temp_dir("zsweep");
    opts.out_dir = out2;
    RunResult rz = sweep_suite(zero, opts);
    CHECK(rz.exit_code == 0);
    for (const auto& level : rz.sweeps[0].levels) CHECK(level.max_gap_pos == 0.0);

    // Sweeping a config with no flagged scenario is a config error.
    SuiteConfig unflagged = parse_suite_text(kQuickScenario);
    auto out3 = temp_dir("nosweep");
    opts.out_dir = out3;
    CHECK(sweep_suite(unflagged, opts).exit_code == 2);
}

TEST_CASE("scenario-level parallelism matches the serial reference") {
    const char* two = R"json({
      "scenarios": [
        {"name": "par_a", "domain": {"kind": "polar_disc", "radius": 1.0, "nr": 16, "nphi": 8},
         "f": 1.0, "g": 0.0, "dt": 0.01, "times": [0.1], "a_cells": 16, "radial_cells": 32},
        {"name": "par_b", "domain": {"kind": "flat_rectangle", "nx": 12, "ny": 12},
         "f": 0.0, "g": {"kind": "eigenmode"}, "dt": 0.01, "times": [0.1],
         "a_cells": 16, "radial_cells": 32}
      ]
    })json";
    SuiteConfig suite = parse_suite_text(two);
    RunOptions serial, parallel;
    serial.quiet = parallel.quiet = true;
    serial.out_dir = temp_dir("serial");
    parallel.out_dir = temp_dir("parallel");
    parallel.threads = 2;
    RunResult r1 = run_suite(suite, serial);
    RunResult r2 = run_suite(suite, parallel);
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    for (const char* name : {"par_a_comparison.csv", "par_b_comparison.csv"})
        CHECK(slurp(serial.out_dir / name) == slurp(parallel.out_dir / name));
}

TEST_CASE("equality flag demands radial data") {
    const char* text = R"json({
      "scenarios": [
        {"name": "bad_equality",
         "domain": {"kind": "polar_disc", "radius": 1.0, "nr": 16, "nphi": 8},
         "f": 1.0, "g": {"kind": "gaussian", "center": [0.4, 0.0], "width": 0.2},
         "dt": 0.01, "times": [0.1], "equality_case": true}
      ]
    })json";
    SuiteConfig suite = parse_suite_text(text);
    CHECK_THROWS_AS(run_scenario(suite.scenarios[0]), ConfigError);
}
