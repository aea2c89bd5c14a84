#pragma once

// Bundled scenario configurations: the certification suite over the six
// shipped domains with three data pairs each, the ball equality cases,
// the refinement sweeps, and a small demo. `symmheat list-presets --dump
// <name>` prints any of these for editing.

#include <map>
#include <stdexcept>
#include <string>

namespace symmheat::bundled {

// Six domains (flat square, L-shape, masked ellipse, polar annulus,
// half-angle cone, spherical cap) x three data pairs:
//   const: f = 1, g = 0; decay: f = 0, g = gaussian;
//   mixed: f = gaussian, g = eigenmode.
// Resolutions follow the certification grid (h = 1/128 flat, 256 cells
// radial/angular) with dt = 1e-3 and the default snapshot schedule.
inline const char* kAcceptanceSuite = R"json({
  "scenarios": [
    {"name": "square_const", "domain": {"kind": "flat_rectangle", "nx": 128, "ny": 128},
     "f": 1.0, "g": 0.0},
    {"name": "square_decay", "domain": {"kind": "flat_rectangle", "nx": 128, "ny": 128},
     "f": 0.0, "g": {"kind": "gaussian", "center": [0.4, 0.55], "width": 0.18}},
    {"name": "square_mixed", "domain": {"kind": "flat_rectangle", "nx": 128, "ny": 128},
     "f": {"kind": "gaussian", "center": [0.6, 0.4], "width": 0.2}, "g": {"kind": "eigenmode"}},

    {"name": "lshape_const", "domain": {"kind": "flat_lshape", "nx": 128, "ny": 128},
     "f": 1.0, "g": 0.0},
    {"name": "lshape_decay", "domain": {"kind": "flat_lshape", "nx": 128, "ny": 128},
     "f": 0.0, "g": {"kind": "gaussian", "center": [0.3, 0.3], "width": 0.2}},
    {"name": "lshape_mixed", "domain": {"kind": "flat_lshape", "nx": 128, "ny": 128},
     "f": {"kind": "gaussian", "center": [0.25, 0.6], "width": 0.18}, "g": {"kind": "eigenmode"}},

    {"name": "ellipse_const",
     "domain": {"kind": "flat_mask", "shape": "ellipse", "center": [0.0, 0.0],
                "radii": [0.6, 0.35], "nx": 154, "ny": 90},
     "f": 1.0, "g": 0.0},
    {"name": "ellipse_decay",
     "domain": {"kind": "flat_mask", "shape": "ellipse", "center": [0.0, 0.0],
                "radii": [0.6, 0.35], "nx": 154, "ny": 90},
     "f": 0.0, "g": {"kind": "gaussian", "center": [0.15, 0.0], "width": 0.2}},
    {"name": "ellipse_mixed",
     "domain": {"kind": "flat_mask", "shape": "ellipse", "center": [0.0, 0.0],
                "radii": [0.6, 0.35], "nx": 154, "ny": 90},
     "f": {"kind": "gaussian", "center": [-0.2, 0.05], "width": 0.2}, "g": {"kind": "eigenmode"}},

    {"name": "annulus_const",
     "domain": {"kind": "polar_annulus", "r_inner": 0.3, "r_outer": 1.0, "nr": 256, "nphi": 256},
     "f": 1.0, "g": 0.0},
    {"name": "annulus_decay",
     "domain": {"kind": "polar_annulus", "r_inner": 0.3, "r_outer": 1.0, "nr": 256, "nphi": 256},
     "f": 0.0, "g": {"kind": "gaussian", "center": [0.65, 0.0], "width": 0.15}},
    {"name": "annulus_mixed",
     "domain": {"kind": "polar_annulus", "r_inner": 0.3, "r_outer": 1.0, "nr": 256, "nphi": 256},
     "f": {"kind": "gaussian", "center": [0.0, 0.65], "width": 0.15}, "g": {"kind": "eigenmode"}},

    {"name": "cone_const",
     "domain": {"kind": "cone_polar", "total_angle": 3.14159265358979323846, "radius": 1.0,
                "nr": 256, "nphi": 256},
     "f": 1.0, "g": 0.0},
    {"name": "cone_decay",
     "domain": {"kind": "cone_polar", "total_angle": 3.14159265358979323846, "radius": 1.0,
                "nr": 256, "nphi": 256},
     "f": 0.0, "g": {"kind": "gaussian", "center": [0.0, 0.35], "width": 0.2}},
    {"name": "cone_mixed",
     "domain": {"kind": "cone_polar", "total_angle": 3.14159265358979323846, "radius": 1.0,
                "nr": 256, "nphi": 256},
     "f": {"kind": "gaussian", "center": [0.0, 0.3], "width": 0.2}, "g": {"kind": "eigenmode"}},

    {"name": "cap_const",
     "domain": {"kind": "sphere_latlong", "shape": "cap", "cap_radius": 1.0, "nr": 256, "nphi": 256},
     "kappa": 1.0, "f": 1.0, "g": 0.0},
    {"name": "cap_decay",
     "domain": {"kind": "sphere_latlong", "shape": "cap", "cap_radius": 1.0, "nr": 256, "nphi": 256},
     "kappa": 1.0, "f": 0.0, "g": {"kind": "gaussian", "center": [0.0, 0.3], "width": 0.25}},
    {"name": "cap_mixed",
     "domain": {"kind": "sphere_latlong", "shape": "cap", "cap_radius": 1.0, "nr": 256, "nphi": 256},
     "kappa": 1.0, "f": {"kind": "gaussian", "center": [0.3, 0.2], "width": 0.25},
     "g": {"kind": "eigenmode"}}
  ]
})json";

// Ball equality cases: radial nonincreasing data on the unit disc.
inline const char* kEqualityCases = R"json({
  "scenarios": [
    {"name": "disc_equality_torsion",
     "domain": {"kind": "polar_disc", "radius": 1.0, "nr": 128, "nphi": 256},
     "f": 1.0, "g": 0.0, "dt": 0.001,
     "times": [0.005, 0.01, 0.02, 0.04, 0.08, 0.16, 0.32],
     "equality_case": true},
    {"name": "disc_equality_gaussian",
     "domain": {"kind": "polar_disc", "radius": 1.0, "nr": 128, "nphi": 256},
     "f": 0.0, "g": {"kind": "gaussian", "center": [0.0, 0.0], "width": 0.3}, "dt": 0.001,
     "times": [0.005, 0.01, 0.02, 0.04, 0.08, 0.16, 0.32],
     "equality_case": true}
  ]
})json";

// Refinement sweeps: three levels of h, h/2, h/4 with dt scaled as h^2,
// anchored so the finest level matches the certification resolution.
inline const char* kRefinementSweeps = R"json({
  "scenarios": [
    {"name": "square_const_sweep", "domain": {"kind": "flat_rectangle", "nx": 32, "ny": 32},
     "f": 1.0, "g": 0.0, "dt": 0.016,
     "times": [0.04, 0.08, 0.16, 0.32], "refinement_sweep": true},
    {"name": "cone_const_sweep",
     "domain": {"kind": "cone_polar", "total_angle": 3.14159265358979323846, "radius": 1.0,
                "nr": 64, "nphi": 64},
     "f": 1.0, "g": 0.0, "dt": 0.016,
     "times": [0.04, 0.08, 0.16, 0.32], "refinement_sweep": true},
    {"name": "disc_equality_sweep",
     "domain": {"kind": "polar_disc", "radius": 1.0, "nr": 32, "nphi": 64},
     "f": 1.0, "g": 0.0, "dt": 0.016,
     "times": [0.04, 0.08, 0.16, 0.32], "equality_case": true, "refinement_sweep": true}
  ]
})json";

// A small, fast example.
inline const char* kDemo = R"json({
  "scenarios": [
    {"name": "demo_disc",
     "domain": {"kind": "polar_disc", "radius": 1.0, "nr": 32, "nphi": 16},
     "f": 1.0, "g": 0.0, "dt": 0.005, "times": [0.05, 0.2, 0.8],
     "a_cells": 64, "radial_cells": 128}
  ]
})json";

inline const std::map<std::string, const char*>& all() {
    static const std::map<std::string, const char*> configs = {
        {"acceptance_suite", kAcceptanceSuite},
        {"equality_cases", kEqualityCases},
        {"refinement_sweeps", kRefinementSweeps},
        {"demo", kDemo},
    };
    return configs;
}

inline const char* text(const std::string& name) {
    const auto& configs = all();
    auto it = configs.find(name);
    if (it == configs.end())
        throw std::out_of_range("no bundled config named '" + name + "'");
    return it->second;
}

}  // namespace symmheat::bundled
