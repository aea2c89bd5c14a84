#pragma once

// Scenario configuration (JSON), the end-to-end verification pipeline
// (mesh -> solve -> rearrange -> symmetrize -> compare), refinement
// sweeps, and artifact emission (CSV surfaces, L^p tables, sweep tables,
// machine-readable summary).
//
// Exit-code contract: 0 all verdicts pass, 1 comparison/solver failure,
// 2 configuration error. Every run writes summary.json before exiting.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "symmheat/comparison.hpp"
#include "symmheat/geometry.hpp"
#include "symmheat/heat_solver.hpp"
#include "symmheat/mesh.hpp"
#include "symmheat/sources.hpp"
#include "symmheat/symmetrized.hpp"

namespace symmheat {

using Json = nlohmann::ordered_json;

struct ScenarioConfig {
    std::string name;
    DomainSpec domain;
    double kappa = 0.0;
    int dim = 2;
    double theta = 1.0;  // resolved value (cones derive it from the angle)
    SourceSpec f = SourceSpec::constant(0.0);
    SourceSpec g = SourceSpec::constant(0.0);
    double dt = 1e-3;
    std::vector<double> times;
    int a_cells = 256;
    int radial_cells = 512;
    std::optional<double> tolerance_abs;  // absolute override
    double tolerance_rel = 1e-2;          // default rule: rel * max(V)
    double equality_tolerance_rel = 5e-3;
    double lp_tolerance_rel = 1e-2;
    bool equality_case = false;
    bool refinement_sweep = false;
    HeatOptions solver;
};

struct SuiteConfig {
    std::vector<ScenarioConfig> scenarios;
};

// Transient and near-steady coverage: 0.005 * 2^k up to 2.56.
inline std::vector<double> default_schedule() {
    std::vector<double> t;
    for (double x = 0.005; x < 2.56 * (1.0 + 1e-12); x *= 2.0) t.push_back(x);
    return t;
}

// ---------------------------------------------------------------------
// JSON parsing (strict: unknown keys are configuration errors)
// ---------------------------------------------------------------------

namespace cfg_detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path, msg);
}

inline void check_keys(const Json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) fail(path + "." + key, "unknown field");
    }
}

inline double number_at(const Json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing required field");
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

inline double number_or(const Json& obj, const std::string& path, const char* key, double dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

inline int int_or(const Json& obj, const std::string& path, const char* key, int dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return obj[key].get<int>();
}

inline int int_at(const Json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing required field");
    if (!obj[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    return obj[key].get<int>();
}

inline bool bool_or(const Json& obj, const std::string& path, const char* key, bool dflt) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_boolean()) fail(path + "." + key, "expected a boolean");
    return obj[key].get<bool>();
}

inline std::string string_at(const Json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) fail(path + "." + key, "missing required field");
    if (!obj[key].is_string()) fail(path + "." + key, "expected a string");
    return obj[key].get<std::string>();
}

inline std::pair<double, double> point_at(const Json& obj, const std::string& path,
                                          const char* key) {
    if (!obj.contains(key) || !obj[key].is_array() || obj[key].size() != 2 ||
        !obj[key][0].is_number() || !obj[key][1].is_number())
        fail(path + "." + key, "expected a [x, y] pair");
    return {obj[key][0].get<double>(), obj[key][1].get<double>()};
}

inline DomainSpec parse_domain(const Json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    const std::string kind = string_at(j, path, "kind");
    DomainSpec d;
    if (kind == "flat_rectangle" || kind == "flat_lshape") {
        d.kind = (kind == "flat_rectangle") ? DomainKind::FlatRectangle : DomainKind::FlatLShape;
        check_keys(j, path, {"kind", "width", "height", "nx", "ny"});
        d.width = number_or(j, path, "width", 1.0);
        d.height = number_or(j, path, "height", 1.0);
        d.nx = int_at(j, path, "nx");
        d.ny = int_at(j, path, "ny");
    } else if (kind == "flat_mask") {
        d.kind = DomainKind::FlatMask;
        check_keys(j, path,
                   {"kind", "shape", "center", "radius", "radii", "r_inner", "r_outer", "nx", "ny"});
        const std::string shape = string_at(j, path, "shape");
        auto [cx, cy] = j.contains("center") ? point_at(j, path, "center")
                                             : std::pair<double, double>{0.0, 0.0};
        d.mask_cx = cx;
        d.mask_cy = cy;
        if (shape == "disc") {
            d.mask_shape = MaskShape::Disc;
            d.mask_rx = number_at(j, path, "radius");
        } else if (shape == "ellipse") {
            d.mask_shape = MaskShape::Ellipse;
            auto [rx, ry] = point_at(j, path, "radii");
            d.mask_rx = rx;
            d.mask_ry = ry;
        } else if (shape == "annulus") {
            d.mask_shape = MaskShape::Annulus;
            d.mask_rx = number_at(j, path, "r_outer");
            d.mask_inner = number_at(j, path, "r_inner");
        } else {
            fail(path + ".shape", "expected disc, ellipse or annulus");
        }
        d.nx = int_at(j, path, "nx");
        d.ny = int_at(j, path, "ny");
    } else if (kind == "polar_disc") {
        d.kind = DomainKind::PolarDisc;
        check_keys(j, path, {"kind", "radius", "nr", "nphi"});
        d.radius = number_at(j, path, "radius");
        d.nr = int_at(j, path, "nr");
        d.nphi = int_at(j, path, "nphi");
    } else if (kind == "polar_annulus") {
        d.kind = DomainKind::PolarAnnulus;
        check_keys(j, path, {"kind", "r_inner", "r_outer", "nr", "nphi", "inner_dirichlet"});
        d.r_inner = number_at(j, path, "r_inner");
        d.radius = number_at(j, path, "r_outer");
        d.inner_dirichlet = bool_or(j, path, "inner_dirichlet", true);
        d.nr = int_at(j, path, "nr");
        d.nphi = int_at(j, path, "nphi");
    } else if (kind == "cone_polar") {
        d.kind = DomainKind::ConePolar;
        check_keys(j, path, {"kind", "total_angle", "radius", "r_inner", "nr", "nphi"});
        d.total_angle = number_at(j, path, "total_angle");
        d.radius = number_at(j, path, "radius");
        d.r_inner = number_or(j, path, "r_inner", 0.0);
        d.nr = int_at(j, path, "nr");
        d.nphi = int_at(j, path, "nphi");
    } else if (kind == "sphere_latlong") {
        d.kind = DomainKind::SphereLatlong;
        check_keys(j, path,
                   {"kind", "shape", "cap_radius", "r_inner", "r_outer", "mask_expr", "nr", "nphi"});
        const std::string shape =
            j.contains("shape") ? string_at(j, path, "shape") : std::string("cap");
        if (shape == "cap") {
            d.sphere_shape = SphereShape::Cap;
            d.radius = number_at(j, path, "cap_radius");
        } else if (shape == "band") {
            d.sphere_shape = SphereShape::Band;
            d.r_inner = number_at(j, path, "r_inner");
            d.radius = number_at(j, path, "r_outer");
        } else if (shape == "mask") {
            d.sphere_shape = SphereShape::Mask;
            d.radius = number_at(j, path, "cap_radius");
            d.sphere_mask_expr = string_at(j, path, "mask_expr");
        } else {
            fail(path + ".shape", "expected cap, band or mask");
        }
        d.nr = int_at(j, path, "nr");
        d.nphi = int_at(j, path, "nphi");
    } else {
        fail(path + ".kind", "unknown domain kind '" + kind + "'");
    }
    return d;
}

inline SourceSpec parse_source(const Json& j, const std::string& path) {
    if (j.is_number()) return SourceSpec::constant(j.get<double>());
    if (j.is_string()) return SourceSpec::expression(j.get<std::string>());
    if (!j.is_object()) fail(path, "expected a number, an expression string, or an object");
    const std::string kind = string_at(j, path, "kind");
    SourceSpec s;
    if (kind == "constant") {
        check_keys(j, path, {"kind", "value"});
        s = SourceSpec::constant(number_at(j, path, "value"));
    } else if (kind == "expression") {
        check_keys(j, path, {"kind", "expr"});
        s = SourceSpec::expression(string_at(j, path, "expr"));
    } else if (kind == "gaussian") {
        check_keys(j, path, {"kind", "center", "width", "amplitude"});
        auto [cx, cy] = point_at(j, path, "center");
        s = SourceSpec::gaussian(cx, cy, number_at(j, path, "width"),
                                 number_or(j, path, "amplitude", 1.0));
        if (!(s.width > 0.0)) fail(path + ".width", "must be positive");
    } else if (kind == "eigenmode") {
        check_keys(j, path, {"kind"});
        s = SourceSpec::eigenmode();
    } else if (kind == "radial_poly") {
        check_keys(j, path, {"kind", "coeffs"});
        if (!j.contains("coeffs") || !j["coeffs"].is_array())
            fail(path + ".coeffs", "expected an array of numbers");
        s.kind = SourceKind::RadialPoly;
        for (const auto& c : j["coeffs"]) {
            if (!c.is_number()) fail(path + ".coeffs", "expected an array of numbers");
            s.coeffs.push_back(c.get<double>());
        }
    } else if (kind == "indicator") {
        const std::string shape = string_at(j, path, "shape");
        s.kind = SourceKind::Indicator;
        if (shape == "disc") {
            check_keys(j, path, {"kind", "shape", "center", "radius"});
            s.indicator_disc = true;
            auto [cx, cy] = point_at(j, path, "center");
            s.center_x = cx;
            s.center_y = cy;
            s.indicator_radius = number_at(j, path, "radius");
        } else if (shape == "box") {
            check_keys(j, path, {"kind", "shape", "min", "max"});
            s.indicator_disc = false;
            auto [x0, y0] = point_at(j, path, "min");
            auto [x1, y1] = point_at(j, path, "max");
            s.box_x0 = x0;
            s.box_y0 = y0;
            s.box_x1 = x1;
            s.box_y1 = y1;
        } else {
            fail(path + ".shape", "expected disc or box");
        }
    } else {
        fail(path + ".kind", "unknown source kind '" + kind + "'");
    }
    return s;
}

inline Json domain_to_json(const DomainSpec& d) {
    Json j;
    switch (d.kind) {
        case DomainKind::FlatRectangle:
        case DomainKind::FlatLShape:
            j["kind"] = (d.kind == DomainKind::FlatRectangle) ? "flat_rectangle" : "flat_lshape";
            j["width"] = d.width;
            j["height"] = d.height;
            j["nx"] = d.nx;
            j["ny"] = d.ny;
            break;
        case DomainKind::FlatMask:
            j["kind"] = "flat_mask";
            if (d.mask_shape == MaskShape::Disc) {
                j["shape"] = "disc";
                j["center"] = {d.mask_cx, d.mask_cy};
                j["radius"] = d.mask_rx;
            } else if (d.mask_shape == MaskShape::Ellipse) {
                j["shape"] = "ellipse";
                j["center"] = {d.mask_cx, d.mask_cy};
                j["radii"] = {d.mask_rx, d.mask_ry};
            } else {
                j["shape"] = "annulus";
                j["center"] = {d.mask_cx, d.mask_cy};
                j["r_inner"] = d.mask_inner;
                j["r_outer"] = d.mask_rx;
            }
            j["nx"] = d.nx;
            j["ny"] = d.ny;
            break;
        case DomainKind::PolarDisc:
            j["kind"] = "polar_disc";
            j["radius"] = d.radius;
            j["nr"] = d.nr;
            j["nphi"] = d.nphi;
            break;
        case DomainKind::PolarAnnulus:
            j["kind"] = "polar_annulus";
            j["r_inner"] = d.r_inner;
            j["r_outer"] = d.radius;
            j["inner_dirichlet"] = d.inner_dirichlet;
            j["nr"] = d.nr;
            j["nphi"] = d.nphi;
            break;
        case DomainKind::ConePolar:
            j["kind"] = "cone_polar";
            j["total_angle"] = d.total_angle;
            j["radius"] = d.radius;
            if (d.r_inner > 0.0) j["r_inner"] = d.r_inner;
            j["nr"] = d.nr;
            j["nphi"] = d.nphi;
            break;
        case DomainKind::SphereLatlong:
            j["kind"] = "sphere_latlong";
            if (d.sphere_shape == SphereShape::Cap) {
                j["shape"] = "cap";
                j["cap_radius"] = d.radius;
            } else if (d.sphere_shape == SphereShape::Band) {
                j["shape"] = "band";
                j["r_inner"] = d.r_inner;
                j["r_outer"] = d.radius;
            } else {
                j["shape"] = "mask";
                j["cap_radius"] = d.radius;
                j["mask_expr"] = d.sphere_mask_expr;
            }
            j["nr"] = d.nr;
            j["nphi"] = d.nphi;
            break;
    }
    return j;
}

inline Json source_to_json(const SourceSpec& s) {
    Json j;
    switch (s.kind) {
        case SourceKind::Constant:
            j["kind"] = "constant";
            j["value"] = s.value;
            break;
        case SourceKind::Expression:
            j["kind"] = "expression";
            j["expr"] = s.expr;
            break;
        case SourceKind::Gaussian:
            j["kind"] = "gaussian";
            j["center"] = {s.center_x, s.center_y};
            j["width"] = s.width;
            j["amplitude"] = s.amplitude;
            break;
        case SourceKind::Eigenmode:
            j["kind"] = "eigenmode";
            break;
        case SourceKind::RadialPoly:
            j["kind"] = "radial_poly";
            j["coeffs"] = s.coeffs;
            break;
        case SourceKind::Indicator:
            j["kind"] = "indicator";
            if (s.indicator_disc) {
                j["shape"] = "disc";
                j["center"] = {s.center_x, s.center_y};
                j["radius"] = s.indicator_radius;
            } else {
                j["shape"] = "box";
                j["min"] = {s.box_x0, s.box_y0};
                j["max"] = {s.box_x1, s.box_y1};
            }
            break;
    }
    return j;
}

}  // namespace cfg_detail

inline ScenarioConfig parse_scenario(const Json& j, const std::string& path) {
    using namespace cfg_detail;
    if (!j.is_object()) fail(path, "expected an object");
    check_keys(j, path,
               {"name", "domain", "kappa", "n", "theta", "f", "g", "dt", "times", "a_cells",
                "radial_cells", "tolerance", "tolerance_rel", "equality_tolerance_rel",
                "lp_tolerance_rel", "equality_case", "refinement_sweep", "solver"});
    ScenarioConfig c;
    c.name = string_at(j, path, "name");
    if (c.name.empty()) fail(path + ".name", "must be nonempty");
    if (!j.contains("domain")) fail(path + ".domain", "missing required field");
    c.domain = parse_domain(j["domain"], path + ".domain");

    c.kappa = number_or(j, path, "kappa", c.domain.kind == DomainKind::SphereLatlong ? 1.0 : 0.0);
    c.dim = int_or(j, path, "n", 2);
    if (c.dim != 2)
        fail(path + ".n", "the solver lab is two-dimensional (the geometry API alone supports n > 2)");
    if (c.kappa < 0.0) fail(path + ".kappa", "must be >= 0");
    const bool sphere = c.domain.kind == DomainKind::SphereLatlong;
    if (sphere && !(c.kappa > 0.0)) fail(path + ".kappa", "sphere domains require kappa > 0");
    if (!sphere && c.kappa != 0.0) fail(path + ".kappa", "kappa > 0 requires a sphere domain");
    c.domain.kappa = sphere ? c.kappa : 1.0;

    const double derived_theta = (c.domain.kind == DomainKind::ConePolar)
                                     ? theta_for_cone(c.domain.total_angle)
                                     : 1.0;
    c.theta = number_or(j, path, "theta", derived_theta);
    if (std::abs(c.theta - derived_theta) > 1e-12)
        fail(path + ".theta",
             (c.domain.kind == DomainKind::ConePolar)
                 ? "theta must equal total_angle / (2*pi) for cone domains"
                 : "theta must be 1 for non-cone domains");
    c.theta = derived_theta;

    if (!j.contains("f")) fail(path + ".f", "missing required field");
    if (!j.contains("g")) fail(path + ".g", "missing required field");
    c.f = parse_source(j["f"], path + ".f");
    c.g = parse_source(j["g"], path + ".g");

    c.dt = number_or(j, path, "dt", 1e-3);
    if (!(c.dt > 0.0)) fail(path + ".dt", "must be positive");
    if (j.contains("times")) {
        if (!j["times"].is_array() || j["times"].empty())
            fail(path + ".times", "expected a nonempty array of increasing times");
        double prev = 0.0;
        for (const auto& t : j["times"]) {
            if (!t.is_number() || !(t.get<double>() > prev))
                fail(path + ".times", "snapshot times must be strictly increasing and > 0");
            prev = t.get<double>();
            c.times.push_back(prev);
        }
    } else {
        c.times = default_schedule();
    }
    c.a_cells = int_or(j, path, "a_cells", 256);
    c.radial_cells = int_or(j, path, "radial_cells", 512);
    if (c.a_cells < 4) fail(path + ".a_cells", "must be at least 4");
    if (c.radial_cells < 4) fail(path + ".radial_cells", "must be at least 4");

    if (j.contains("tolerance")) {
        if (!j["tolerance"].is_number() || !(j["tolerance"].get<double>() > 0.0))
            fail(path + ".tolerance", "must be a positive number");
        c.tolerance_abs = j["tolerance"].get<double>();
    }
    c.tolerance_rel = number_or(j, path, "tolerance_rel", 1e-2);
    c.equality_tolerance_rel = number_or(j, path, "equality_tolerance_rel", 5e-3);
    c.lp_tolerance_rel = number_or(j, path, "lp_tolerance_rel", 1e-2);
    if (!(c.tolerance_rel > 0.0)) fail(path + ".tolerance_rel", "must be positive");
    if (!(c.equality_tolerance_rel > 0.0))
        fail(path + ".equality_tolerance_rel", "must be positive");
    if (!(c.lp_tolerance_rel > 0.0)) fail(path + ".lp_tolerance_rel", "must be positive");

    c.equality_case = bool_or(j, path, "equality_case", false);
    c.refinement_sweep = bool_or(j, path, "refinement_sweep", false);
    if (c.equality_case) {
        const bool ball = c.domain.kind == DomainKind::PolarDisc ||
                          (sphere && c.domain.sphere_shape == SphereShape::Cap);
        if (!ball || c.theta != 1.0)
            fail(path + ".equality_case",
                 "equality scenarios need a polar disc or spherical cap with theta = 1");
    }

    if (j.contains("solver")) {
        const Json& s = j["solver"];
        if (!s.is_object()) fail(path + ".solver", "expected an object");
        check_keys(s, path + ".solver", {"preconditioner", "cg_rel_tol"});
        const std::string pre = s.contains("preconditioner")
                                    ? string_at(s, path + ".solver", "preconditioner")
                                    : std::string("auto");
        if (pre == "auto")
            c.solver.preconditioner = Preconditioner::Auto;
        else if (pre == "jacobi")
            c.solver.preconditioner = Preconditioner::Jacobi;
        else if (pre == "line")
            c.solver.preconditioner = Preconditioner::Line;
        else if (pre == "none")
            c.solver.preconditioner = Preconditioner::None;
        else
            fail(path + ".solver.preconditioner", "expected auto, jacobi, line or none");
        c.solver.cg_rel_tol = number_or(s, path + ".solver", "cg_rel_tol", 1e-10);
        if (!(c.solver.cg_rel_tol > 0.0) || c.solver.cg_rel_tol > 1e-4)
            fail(path + ".solver.cg_rel_tol", "must lie in (0, 1e-4]");
    }
    return c;
}

inline SuiteConfig parse_suite(const Json& j) {
    using namespace cfg_detail;
    if (!j.is_object()) fail("config", "top level must be an object");
    check_keys(j, "config", {"scenarios"});
    if (!j.contains("scenarios") || !j["scenarios"].is_array() || j["scenarios"].empty())
        fail("config.scenarios", "expected a nonempty array");
    SuiteConfig suite;
    for (std::size_t i = 0; i < j["scenarios"].size(); ++i)
        suite.scenarios.push_back(
            parse_scenario(j["scenarios"][i], "scenarios[" + std::to_string(i) + "]"));
    for (std::size_t i = 0; i < suite.scenarios.size(); ++i)
        for (std::size_t k = i + 1; k < suite.scenarios.size(); ++k)
            if (suite.scenarios[i].name == suite.scenarios[k].name)
                fail("scenarios[" + std::to_string(k) + "].name",
                     "duplicate scenario name '" + suite.scenarios[i].name + "'");
    return suite;
}

inline SuiteConfig parse_suite_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", std::string("not valid JSON: ") + e.what());
    }
    return parse_suite(j);
}

inline SuiteConfig parse_suite_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_suite_text(text);
}

inline Json scenario_to_json(const ScenarioConfig& c) {
    using namespace cfg_detail;
    Json j;
    j["name"] = c.name;
    j["domain"] = domain_to_json(c.domain);
    j["kappa"] = c.kappa;
    j["n"] = c.dim;
    j["theta"] = c.theta;
    j["f"] = source_to_json(c.f);
    j["g"] = source_to_json(c.g);
    j["dt"] = c.dt;
    j["times"] = c.times;
    j["a_cells"] = c.a_cells;
    j["radial_cells"] = c.radial_cells;
    if (c.tolerance_abs) j["tolerance"] = *c.tolerance_abs;
    j["tolerance_rel"] = c.tolerance_rel;
    j["equality_tolerance_rel"] = c.equality_tolerance_rel;
    j["lp_tolerance_rel"] = c.lp_tolerance_rel;
    j["equality_case"] = c.equality_case;
    j["refinement_sweep"] = c.refinement_sweep;
    const char* pre = "auto";
    switch (c.solver.preconditioner) {
        case Preconditioner::Auto: pre = "auto"; break;
        case Preconditioner::Jacobi: pre = "jacobi"; break;
        case Preconditioner::Line: pre = "line"; break;
        case Preconditioner::None: pre = "none"; break;
    }
    j["solver"] = {{"preconditioner", pre}, {"cg_rel_tol", c.solver.cg_rel_tol}};
    return j;
}

inline Json suite_to_json(const SuiteConfig& suite) {
    Json j;
    j["scenarios"] = Json::array();
    for (const auto& s : suite.scenarios) j["scenarios"].push_back(scenario_to_json(s));
    return j;
}

// ---------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------

struct ScenarioOutcome {
    ScenarioConfig config;
    ComparisonReport report;
    UScan u_scan;
    VSurface v_surface;  // route A, the acceptance reference
    std::vector<RadialSnapshot> v_radial;
    double mesh_volume = 0.0;
    double symmetrized_volume = 0.0;
    double t0_identity_error = 0.0;
    double shape_violation = 0.0;  // worst monotonicity/concavity breach in U, V
    double runtime_seconds = 0.0;
    bool pass = false;
    std::string failure_reason;
};

inline ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    ScenarioOutcome out;
    out.config = cfg;

    MeshedDomain mesh = build_domain(cfg.domain, cfg.theta);
    assemble_operator(mesh);
    std::vector<double> f_vals = evaluate_source(cfg.f, mesh, cfg.domain, cfg.name + ".f");
    std::vector<double> g_vals = evaluate_source(cfg.g, mesh, cfg.domain, cfg.name + ".g");
    if (cfg.equality_case) {
        // Equality scenarios require radial data: values on a polar mesh
        // must agree along each ring.
        const int nr = cfg.domain.nr;
        for (const auto* vals : {&f_vals, &g_vals}) {
            for (std::size_t i = 0; i < vals->size(); ++i) {
                const std::size_t ring = i % nr;
                const double ref = (*vals)[ring];
                if (std::abs((*vals)[i] - ref) > 1e-12 * std::max(1.0, std::abs(ref)))
                    throw ConfigError(cfg.name, "equality_case requires radial f and g");
            }
        }
    }

    auto snapshots = solve_heat(mesh, f_vals, g_vals, cfg.times, cfg.dt, cfg.solver);

    bool dmp_warn = false;
    WeightedField f_field = field_as_weighted({0.0, f_vals}, mesh);
    WeightedField g_field = field_as_weighted({0.0, g_vals}, mesh);
    SymmetrizationTarget target(mesh.model, cfg.theta);
    SymmetrizedProblem problem = make_symmetrized_problem(f_field, g_field, target);

    out.mesh_volume = mesh.total_volume();
    out.symmetrized_volume = problem.ball_volume_A;
    auto a_grid = uniform_a_grid(problem.ball_volume_A, cfg.a_cells);

    RadialSolveResult radial =
        solve_v_radial(problem, cfg.times, a_grid, cfg.radial_cells, cfg.dt);
    out.v_surface = std::move(radial.surface);
    out.v_radial = std::move(radial.snapshots);

    out.u_scan = compute_U(snapshots, mesh, cfg.theta, a_grid);

    const double max_v = out.v_surface.max_value();
    const double tolerance = cfg.tolerance_abs ? *cfg.tolerance_abs : cfg.tolerance_rel * max_v;
    out.report = compare(out.u_scan, out.v_surface, tolerance);
    out.report.lp_rel_tol = cfg.lp_tolerance_rel;

    for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
        for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()})
            out.report.lp_gaps.push_back(lp_gap(snapshots[ti], mesh, out.v_radial[ti], cfg.theta, p));
        bool warn = false;
        StepFunction star = decreasing_rearrangement(field_as_weighted(snapshots[ti], mesh, &warn));
        dmp_warn = dmp_warn || warn;
        out.report.u_star_at_full_volume =
            std::max(out.report.u_star_at_full_volume, star.min_value());
    }
    out.report.dmp_warning = dmp_warn;

    if (cfg.equality_case) {
        out.report.equality_flagged = true;
        out.report.equality_gap = equality_case_check(out.u_scan, out.v_surface);
        out.report.equality_tolerance = cfg.equality_tolerance_rel * max_v;
    }

    // t = 0 identity, straight from the rearranged initial data.
    StepFunction g_star = decreasing_rearrangement(g_field);
    for (double a : a_grid) {
        const double u0 = concentration(g_star, a, cfg.theta);
        const double v0 = initial_V(problem, a);
        out.t0_identity_error = std::max(out.t0_identity_error, std::abs(u0 - v0));
    }

    // Shape invariants: every U and V row nondecreasing and concave.
    const double shape_scale = std::max({out.report.max_U, max_v, 1e-30});
    for (const auto& row : out.u_scan.values)
        out.shape_violation = std::max({out.shape_violation,
                                        max_monotonicity_violation(a_grid, row),
                                        max_concavity_violation(a_grid, row)});
    for (const auto& row : out.v_surface.values)
        out.shape_violation = std::max({out.shape_violation,
                                        max_monotonicity_violation(a_grid, row),
                                        max_concavity_violation(a_grid, row)});

    const bool shape_ok = out.shape_violation <= 1e-10 * shape_scale;
    const bool t0_ok =
        out.t0_identity_error <= 1e-11 * std::max(1.0, g_star.integral(g_star.total_volume()));
    out.pass = out.report.pass() && shape_ok && t0_ok && !dmp_warn;
    if (!out.pass) {
        if (!out.report.gaps_pass())
            out.failure_reason = "max(U - V) = " + std::to_string(out.report.global_max_gap) +
                                 " exceeds tolerance " + std::to_string(tolerance) + " at (a = " +
                                 std::to_string(out.report.argmax_a) + ", t = " +
                                 std::to_string(out.report.argmax_t) + ")";
        else if (!out.report.lp_pass())
            out.failure_reason = "L^p gap beyond tolerance";
        else if (!out.report.equality_pass())
            out.failure_reason = "equality gap beyond tolerance";
        else if (!shape_ok)
            out.failure_reason = "U/V shape invariant violated";
        else if (!t0_ok)
            out.failure_reason = "t = 0 identity violated";
        else
            out.failure_reason = "discrete maximum principle violated";
    }

    out.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

// ---------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------

struct SweepLevel {
    int level = 0;
    double h = 0.0;
    double dt = 0.0;
    double max_gap_pos = 0.0;
    double equality_gap = std::numeric_limits<double>::quiet_NaN();
    double max_v = 0.0;
};

struct SweepOutcome {
    ScenarioConfig config;
    std::vector<SweepLevel> levels;
    bool pass = false;
    std::string failure_reason;
};

inline ScenarioConfig refined(const ScenarioConfig& base, int level) {
    ScenarioConfig c = base;
    const int factor = 1 << level;
    c.domain.nx = base.domain.nx * factor;
    c.domain.ny = base.domain.ny * factor;
    c.domain.nr = base.domain.nr * factor;
    c.domain.nphi = base.domain.nphi * factor;
    c.dt = base.dt / (factor * factor);  // dt ~ h^2
    return c;
}

inline SweepOutcome run_sweep(const ScenarioConfig& cfg, int levels = 3) {
    if (!cfg.refinement_sweep)
        throw ConfigError(cfg.name, "sweep requires the refinement_sweep flag");
    SweepOutcome out;
    out.config = cfg;
    for (int level = 0; level < levels; ++level) {
        ScenarioOutcome o = run_scenario(refined(cfg, level));
        SweepLevel row;
        row.level = level;
        row.h = cfg.domain.is_cartesian() ? cfg.domain.width / (cfg.domain.nx << level)
                                          : (cfg.domain.radius - cfg.domain.r_inner) /
                                                (cfg.domain.nr << level);
        row.dt = cfg.dt / ((1 << level) * (1 << level));
        row.max_gap_pos = std::max(o.report.global_max_gap, 0.0);
        row.max_v = o.v_surface.max_value();
        if (cfg.equality_case) row.equality_gap = o.report.equality_gap;
        out.levels.push_back(row);
    }
    out.pass = true;
    auto shrink_ok = [&](double coarse, double fine, double scale) {
        const double tiny = 1e-12 * std::max(scale, 1e-30);
        if (fine <= tiny) return true;  // reached round-off / exact zero
        return fine * 1.5 <= coarse;
    };
    for (std::size_t k = 0; k + 1 < out.levels.size(); ++k) {
        if (!shrink_ok(out.levels[k].max_gap_pos, out.levels[k + 1].max_gap_pos,
                       out.levels[k + 1].max_v)) {
            out.pass = false;
            out.failure_reason = "positive-part gap did not shrink by 1.5x at level " +
                                 std::to_string(k + 1);
        }
        if (cfg.equality_case &&
            !shrink_ok(out.levels[k].equality_gap, out.levels[k + 1].equality_gap,
                       out.levels[k + 1].max_v)) {
            out.pass = false;
            out.failure_reason =
                "equality gap did not shrink by 1.5x at level " + std::to_string(k + 1);
        }
    }
    return out;
}

// ---------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------

namespace csv_detail {

inline std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace csv_detail

inline std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char c : name)
        out.push_back((std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')
                          ? c
                          : '_');
    return out;
}

inline void write_comparison_csv(const std::filesystem::path& path, const ScenarioOutcome& o) {
    std::ofstream f(path);
    f << "t,a,U,V,V_minus_U\n";
    for (std::size_t ti = 0; ti < o.u_scan.times.size(); ++ti)
        for (std::size_t k = 0; k < o.u_scan.a_grid.size(); ++k) {
            const double u = o.u_scan.values[ti][k], v = o.v_surface.values[ti][k];
            f << csv_detail::num(o.u_scan.times[ti]) << ',' << csv_detail::num(o.u_scan.a_grid[k])
              << ',' << csv_detail::num(u) << ',' << csv_detail::num(v) << ','
              << csv_detail::num(v - u) << '\n';
        }
}

inline void write_lp_csv(const std::filesystem::path& path, const ScenarioOutcome& o) {
    std::ofstream f(path);
    f << "t,p,lhs,rhs,gap\n";
    for (const auto& g : o.report.lp_gaps) {
        f << csv_detail::num(g.time) << ',';
        if (std::isinf(g.p))
            f << "inf";
        else
            f << csv_detail::num(g.p);
        f << ',' << csv_detail::num(g.lhs) << ',' << csv_detail::num(g.rhs) << ','
          << csv_detail::num(g.gap()) << '\n';
    }
}

inline void write_sweep_csv(const std::filesystem::path& path, const SweepOutcome& o) {
    std::ofstream f(path);
    f << "level,h,dt,max_gap_pos,equality_gap\n";
    for (const auto& row : o.levels)
        f << row.level << ',' << csv_detail::num(row.h) << ',' << csv_detail::num(row.dt) << ','
          << csv_detail::num(row.max_gap_pos) << ',' << csv_detail::num(row.equality_gap) << '\n';
}

struct RunOptions {
    std::filesystem::path out_dir = "symmheat_out";
    int threads = 1;
    bool quiet = false;
};

struct RunResult {
    int exit_code = 0;
    std::string status;  // pass | fail | config_error | solver_failure
    std::string diagnostic;
    std::vector<ScenarioOutcome> outcomes;   // completed scenarios
    std::vector<SweepOutcome> sweeps;
};

namespace run_detail {

inline void write_summary(const std::filesystem::path& out_dir, const RunResult& result) {
    Json s;
    s["status"] = result.status;
    s["exit_code"] = result.exit_code;
    if (!result.diagnostic.empty()) s["diagnostic"] = result.diagnostic;
    s["scenarios"] = Json::array();
    for (const auto& o : result.outcomes) {
        Json row;
        row["name"] = o.config.name;
        row["verdict"] = o.pass ? "pass" : "fail";
        if (!o.failure_reason.empty()) row["reason"] = o.failure_reason;
        row["max_gap"] = o.report.global_max_gap;
        row["tolerance"] = o.report.tolerance;
        row["max_V"] = o.report.max_V;
        row["max_U"] = o.report.max_U;
        row["argmax_a"] = o.report.argmax_a;
        row["argmax_t"] = o.report.argmax_t;
        row["lp_pass"] = o.report.lp_pass();
        if (o.report.equality_flagged) {
            row["equality_gap"] = o.report.equality_gap;
            row["equality_tolerance"] = o.report.equality_tolerance;
        }
        row["t0_identity_error"] = o.t0_identity_error;
        row["shape_violation"] = o.shape_violation;
        row["u_star_at_full_volume"] = o.report.u_star_at_full_volume;
        row["u_star_end_above_tolerance"] =
            o.report.u_star_at_full_volume > o.report.tolerance;
        row["dmp_warning"] = o.report.dmp_warning;
        row["mesh_volume"] = o.mesh_volume;
        row["symmetrized_volume"] = o.symmetrized_volume;
        row["runtime_seconds"] = o.runtime_seconds;
        s["scenarios"].push_back(row);
    }
    if (!result.sweeps.empty()) {
        s["sweeps"] = Json::array();
        for (const auto& sw : result.sweeps) {
            Json row;
            row["name"] = sw.config.name;
            row["verdict"] = sw.pass ? "pass" : "fail";
            if (!sw.failure_reason.empty()) row["reason"] = sw.failure_reason;
            Json levels = Json::array();
            for (const auto& lv : sw.levels)
                levels.push_back({{"level", lv.level},
                                  {"h", lv.h},
                                  {"dt", lv.dt},
                                  {"max_gap_pos", lv.max_gap_pos},
                                  {"equality_gap", lv.equality_gap}});
            row["levels"] = levels;
            s["sweeps"].push_back(row);
        }
    }
    std::ofstream f(out_dir / "summary.json");
    f << s.dump(2) << '\n';
}

template <typename Work>
inline void parallel_for(int count, int threads, Work&& work) {
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) work(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, count);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) work(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace run_detail

// Runs every scenario of the suite, writes CSV artifacts, the normalized
// config echo and summary.json, and returns the exit-code contract.
inline RunResult run_suite(const SuiteConfig& suite, const RunOptions& options) {
    namespace fs = std::filesystem;
    RunResult result;
    fs::create_directories(options.out_dir);

    const int n = static_cast<int>(suite.scenarios.size());
    std::vector<ScenarioOutcome> outcomes(n);
    std::vector<std::string> config_errors(n), solver_errors(n);
    run_detail::parallel_for(n, options.threads, [&](int i) {
        try {
            outcomes[i] = run_scenario(suite.scenarios[i]);
        } catch (const ConfigError& e) {
            config_errors[i] = e.what();
        } catch (const SolverError& e) {
            solver_errors[i] = e.what();
        }
    });

    bool any_fail = false;
    std::string config_diag, solver_diag;
    for (int i = 0; i < n; ++i) {
        if (!config_errors[i].empty() && config_diag.empty()) config_diag = config_errors[i];
        if (!solver_errors[i].empty() && solver_diag.empty()) solver_diag = solver_errors[i];
        if (config_errors[i].empty() && solver_errors[i].empty()) {
            if (!outcomes[i].pass) any_fail = true;
            result.outcomes.push_back(std::move(outcomes[i]));
        }
    }

    {
        std::ofstream f(options.out_dir / "config.json");
        f << suite_to_json(suite).dump(2) << '\n';
    }
    for (const auto& o : result.outcomes) {
        const std::string base = sanitize_name(o.config.name);
        write_comparison_csv(options.out_dir / (base + "_comparison.csv"), o);
        write_lp_csv(options.out_dir / (base + "_lp.csv"), o);
    }

    if (!config_diag.empty()) {
        result.exit_code = 2;
        result.status = "config_error";
        result.diagnostic = config_diag;
    } else if (!solver_diag.empty()) {
        result.exit_code = 1;
        result.status = "solver_failure";
        result.diagnostic = solver_diag;
    } else if (any_fail) {
        result.exit_code = 1;
        result.status = "fail";
        for (const auto& o : result.outcomes)
            if (!o.pass) {
                result.diagnostic = o.config.name + ": " + o.failure_reason;
                break;
            }
    } else {
        result.exit_code = 0;
        result.status = "pass";
    }
    run_detail::write_summary(options.out_dir, result);

    if (!options.quiet) {
        for (const auto& o : result.outcomes)
            std::fprintf(stdout, "%-28s %s  max(U-V) = %.3e  tol = %.3e  (%.1fs)\n",
                         o.config.name.c_str(), o.pass ? "pass" : "FAIL",
                         o.report.global_max_gap, o.report.tolerance, o.runtime_seconds);
        if (!result.diagnostic.empty())
            std::fprintf(stdout, "%s: %s\n", result.status.c_str(), result.diagnostic.c_str());
    }
    return result;
}

// Runs the refinement sweeps of every flagged scenario.
inline RunResult sweep_suite(const SuiteConfig& suite, const RunOptions& options) {
    namespace fs = std::filesystem;
    RunResult result;
    fs::create_directories(options.out_dir);

    std::vector<const ScenarioConfig*> flagged;
    for (const auto& s : suite.scenarios)
        if (s.refinement_sweep) flagged.push_back(&s);
    if (flagged.empty()) {
        result.exit_code = 2;
        result.status = "config_error";
        result.diagnostic = "no scenario carries the refinement_sweep flag";
        run_detail::write_summary(options.out_dir, result);
        return result;
    }

    const int n = static_cast<int>(flagged.size());
    std::vector<SweepOutcome> sweeps(n);
    std::vector<std::string> config_errors(n), solver_errors(n);
    run_detail::parallel_for(n, options.threads, [&](int i) {
        try {
            sweeps[i] = run_sweep(*flagged[i]);
        } catch (const ConfigError& e) {
            config_errors[i] = e.what();
        } catch (const SolverError& e) {
            solver_errors[i] = e.what();
        }
    });

    bool any_fail = false;
    std::string config_diag, solver_diag;
    for (int i = 0; i < n; ++i) {
        if (!config_errors[i].empty() && config_diag.empty()) config_diag = config_errors[i];
        if (!solver_errors[i].empty() && solver_diag.empty()) solver_diag = solver_errors[i];
        if (config_errors[i].empty() && solver_errors[i].empty()) {
            if (!sweeps[i].pass) any_fail = true;
            result.sweeps.push_back(std::move(sweeps[i]));
        }
    }

    {
        std::ofstream f(options.out_dir / "config.json");
        f << suite_to_json(suite).dump(2) << '\n';
    }
    for (const auto& sw : result.sweeps)
        write_sweep_csv(options.out_dir / (sanitize_name(sw.config.name) + "_sweep.csv"), sw);

    if (!config_diag.empty()) {
        result.exit_code = 2;
        result.status = "config_error";
        result.diagnostic = config_diag;
    } else if (!solver_diag.empty()) {
        result.exit_code = 1;
        result.status = "solver_failure";
        result.diagnostic = solver_diag;
    } else if (any_fail) {
        result.exit_code = 1;
        result.status = "fail";
        for (const auto& sw : result.sweeps)
            if (!sw.pass) {
                result.diagnostic = sw.config.name + ": " + sw.failure_reason;
                break;
            }
    } else {
        result.exit_code = 0;
        result.status = "pass";
    }
    run_detail::write_summary(options.out_dir, result);

    if (!options.quiet) {
        for (const auto& sw : result.sweeps) {
            std::fprintf(stdout, "%-28s %s  gaps:", sw.config.name.c_str(),
                         sw.pass ? "pass" : "FAIL");
            for (const auto& lv : sw.levels) std::fprintf(stdout, " %.3e", lv.max_gap_pos);
            std::fprintf(stdout, "\n");
        }
        if (!result.diagnostic.empty())
            std::fprintf(stdout, "%s: %s\n", result.status.c_str(), result.diagnostic.c_str());
    }
    return result;
}

}  // namespace symmheat
