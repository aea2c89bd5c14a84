#include <catch2/catch.hpp>

#include <cmath>

#include "oracles.hpp"
#include "symmheat/comparison.hpp"
#include "symmheat/sources.hpp"

using namespace symmheat;

namespace {

MeshedDomain make_mesh(const DomainSpec& d, double theta = 1.0) {
    MeshedDomain m = build_domain(d, theta);
    assemble_operator(m);
    return m;
}

}  // namespace

TEST_CASE("compute_U: zero and constant snapshots") {
    DomainSpec d;
    d.kind = DomainKind::FlatRectangle;
    d.nx = d.ny = 8;
    MeshedDomain m = make_mesh(d);
    const double total = m.total_volume();
    auto a_grid = uniform_a_grid(total, 10);

    std::vector<FieldSnapshot> zero{{0.1, std::vector<double>(m.volume.size(), 0.0)}};
    UScan uz = compute_U(zero, m, 1.0, a_grid);
    for (double v : uz.values[0]) CHECK(v == 0.0);

    std::vector<FieldSnapshot> c{{0.1, std::vector<double>(m.volume.size(), 2.5)}};
    UScan uc = compute_U(c, m, 1.0, a_grid);
    for (std::size_t k = 0; k < a_grid.size(); ++k)
        CHECK(uc.values[0][k] == Approx(2.5 * a_grid[k]).epsilon(1e-13));

    CHECK_THROWS_AS(compute_U(c, m, 0.5, uniform_a_grid(2.1 * total, 4)), std::domain_error);
}

TEST_CASE("compute_U: disc torsion limit matches the closed form") {
    DomainSpec d;
    d.kind = DomainKind::PolarDisc;
    d.radius = 1.0;
    d.nr = 64;
    d.nphi = 16;
    MeshedDomain m = make_mesh(d);
    std::vector<double> ones(m.volume.size(), 1.0);
    std::vector<double> zero(m.volume.size(), 0.0);
    auto snaps = solve_heat(m, ones, zero, {2.5}, 5e-3);
    auto a_grid = uniform_a_grid(m.total_volume(), 32);
    UScan scan = compute_U(snaps, m, 1.0, a_grid);
    for (std::size_t k = 0; k < a_grid.size(); ++k)
        CHECK(scan.values[0][k] ==
              Approx(oracle::disc_torsion_concentration(a_grid[k])).margin(3e-3));
    // Mass identity: theta * U(A, t) = total mass of u.
    double mass = 0.0;
    for (std::size_t i = 0; i < m.volume.size(); ++i)
        mass += m.volume[i] * snaps[0].values[i];
    CHECK(scan.values[0].back() == Approx(mass).epsilon(1e-12));
}

TEST_CASE("U scans are nondecreasing and concave by construction") {
    DomainSpec d;
    d.kind = DomainKind::FlatLShape;
    d.nx = d.ny = 16;
    MeshedDomain m = make_mesh(d);
    auto f = evaluate_source(SourceSpec::constant(1.0), m, d, "f");
    auto g = evaluate_source(SourceSpec::gaussian(0.3, 0.3, 0.2), m, d, "g");
    auto snaps = solve_heat(m, f, g, {0.02, 0.3}, 5e-3);
    auto a_grid = uniform_a_grid(m.total_volume(), 40);
    UScan scan = compute_U(snaps, m, 1.0, a_grid);
    const double scale = scan.max_value();
    for (const auto& row : scan.values) {
        CHECK(row.front() == 0.0);
        CHECK(max_monotonicity_violation(a_grid, row) <= 1e-10 * scale);
        CHECK(max_concavity_violation(a_grid, row) <= 1e-10 * scale);
    }
}

TEST_CASE("compare: identical and uniformly shifted surfaces") {
    auto a_grid = uniform_a_grid(1.0, 8);
    VSurface v;
    v.a_grid = a_grid;
    v.times = {0.1, 0.2};
    v.values = {{0, 1, 2, 3, 4, 5, 6, 7, 8}, {0, 1, 2, 3, 4, 5, 6, 7, 8}};
    for (auto& row : v.values)
        for (auto& x : row) x *= 0.1;

    UScan u;
    u.a_grid = a_grid;
    u.times = v.times;
    u.values = v.values;
    ComparisonReport eq = compare(u, v, 1e-2);
    CHECK(eq.global_max_gap == Approx(0.0).margin(1e-15));
    CHECK(eq.gaps_pass());

    for (auto& row : u.values)
        for (auto& x : row) x -= 1e-3;
    ComparisonReport lower = compare(u, v, 1e-2);
    CHECK(lower.global_max_gap == Approx(-1e-3).epsilon(1e-10));
    CHECK(lower.gaps_pass());

    for (auto& row : u.values)
        for (auto& x : row) x += 1.0;
    ComparisonReport bad = compare(u, v, 1e-2);
    CHECK_FALSE(bad.gaps_pass());
    CHECK(bad.global_max_gap == Approx(1.0 - 1e-3).epsilon(1e-10));

    UScan mismatched = u;
    mismatched.a_grid = uniform_a_grid(1.0, 4);
    mismatched.values = {{0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}};
    CHECK_THROWS_AS(compare(mismatched, v, 1e-2), std::invalid_argument);
}

TEST_CASE("theorem holds on the L-shape with constant source") {
    DomainSpec d;
    d.kind = DomainKind::FlatLShape;
    d.nx = d.ny = 32;
    MeshedDomain m = make_mesh(d);
    auto f = evaluate_source(SourceSpec::constant(1.0), m, d, "f");
    auto g = evaluate_source(SourceSpec::gaussian(0.25, 0.25, 0.15), m, d, "g");
    const std::vector<double> times{0.02, 0.08, 0.32, 1.28};
    const double dt = 2e-3;
    auto snaps = solve_heat(m, f, g, times, dt);

    SymmetrizationTarget target(m.model, 1.0);
    SymmetrizedProblem p = make_symmetrized_problem(
        field_as_weighted({0.0, f}, m), field_as_weighted({0.0, g}, m), target);
    auto a_grid = uniform_a_grid(p.ball_volume_A, 128);
    RadialSolveResult radial = solve_v_radial(p, times, a_grid, 256, dt);
    UScan scan = compute_U(snaps, m, 1.0, a_grid);
    ComparisonReport report = compare(scan, radial.surface, 1e-2 * radial.surface.max_value());
    INFO("max gap " << report.global_max_gap << " tol " << report.tolerance);
    CHECK(report.gaps_pass());
    // Away from a = 0 (where both sides vanish identically) the
    // L-shape-to-disc symmetrization margin is strictly positive.
    double interior_gap = -1e30;
    for (std::size_t ti = 0; ti < scan.times.size(); ++ti)
        for (std::size_t k = 1; k < a_grid.size(); ++k)
            interior_gap = std::max(interior_gap,
                                    scan.values[ti][k] - radial.surface.values[ti][k]);
    CHECK(interior_gap < 0.0);
}

TEST_CASE("lp gaps: identical radial data and the p = 1 mass identity") {
    DomainSpec d;
    d.kind = DomainKind::PolarDisc;
    d.radius = 1.0;
    d.nr = 32;
    d.nphi = 12;
    MeshedDomain m = make_mesh(d);
    auto f = evaluate_source(SourceSpec::constant(1.0), m, d, "f");
    auto g = evaluate_source(SourceSpec::constant(0.0), m, d, "g");
    const std::vector<double> times{0.05, 0.2};
    auto snaps = solve_heat(m, f, g, times, 2e-3);

    SymmetrizationTarget target(m.model, 1.0);
    SymmetrizedProblem p = make_symmetrized_problem(
        field_as_weighted({0.0, f}, m), field_as_weighted({0.0, g}, m), target);
    auto a_grid = uniform_a_grid(p.ball_volume_A, 64);
    RadialSolveResult radial = solve_v_radial(p, times, a_grid, 128, 2e-3);
    UScan scan = compute_U(snaps, m, 1.0, a_grid);

    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        for (double q : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
            LpGap gap = lp_gap(snaps[ti], m, radial.snapshots[ti], 1.0, q);
            CHECK(gap.lhs <= gap.rhs + 1e-2 * gap.rhs + 1e-12);
        }
        // p = 1 equals the full-volume concentration gap exactly.
        LpGap g1 = lp_gap(snaps[ti], m, radial.snapshots[ti], 1.0, 1.0);
        const double concentration_gap =
            scan.values[ti].back() - radial.surface.values[ti].back();
        CHECK(g1.gap() == Approx(concentration_gap).margin(1e-12 * std::max(1.0, g1.lhs)));
    }
    CHECK_THROWS_AS(lp_gap(snaps[0], m, radial.snapshots[0], 1.0, 0.5), std::domain_error);
}

TEST_CASE("equality case: radial data on the disc gives a vanishing gap") {
    DomainSpec d;
    d.kind = DomainKind::PolarDisc;
    d.radius = 1.0;
    d.nr = 64;
    d.nphi = 16;
    MeshedDomain m = make_mesh(d);
    auto f = evaluate_source(SourceSpec::constant(1.0), m, d, "f");
    auto g = evaluate_source(SourceSpec::constant(0.0), m, d, "g");
    const std::vector<double> times{0.02, 0.08, 0.32};
    const double dt = 1e-3;
    auto snaps = solve_heat(m, f, g, times, dt);

    SymmetrizationTarget target(m.model, 1.0);
    SymmetrizedProblem p = make_symmetrized_problem(
        field_as_weighted({0.0, f}, m), field_as_weighted({0.0, g}, m), target);
    auto a_grid = uniform_a_grid(p.ball_volume_A, 128);
    RadialSolveResult radial = solve_v_radial(p, times, a_grid, 512, dt);
    UScan scan = compute_U(snaps, m, 1.0, a_grid);

    const double gap = equality_case_check(scan, radial.surface);
    INFO("equality gap " << gap << " maxV " << radial.surface.max_value());
    CHECK(gap <= 5e-3 * radial.surface.max_value());

    // Zero data: gap identically zero.
    auto z = evaluate_source(SourceSpec::constant(0.0), m, d, "f");
    auto zsnaps = solve_heat(m, z, z, times, dt);
    SymmetrizedProblem zp = make_symmetrized_problem(
        field_as_weighted({0.0, z}, m), field_as_weighted({0.0, z}, m), target);
    RadialSolveResult zr = solve_v_radial(zp, times, a_grid, 64, dt);
    CHECK(equality_case_check(compute_U(zsnaps, m, 1.0, a_grid), zr.surface) == 0.0);
}

TEST_CASE("lp gaps vanish when u and v are the same radial field") {
    DomainSpec d;
    d.kind = DomainKind::PolarDisc;
    d.radius = 1.0;
    d.nr = 24;
    d.nphi = 16;
    MeshedDomain m = make_mesh(d);
    // Radial data on the disc; fold the mesh field into shells so that the
    // "ball" side carries exactly the same function.
    auto u_vals = evaluate_source(SourceSpec::gaussian(0.0, 0.0, 0.4), m, d, "g");
    FieldSnapshot snap{0.1, u_vals};
    RadialSnapshot v;
    v.time = 0.1;
    v.r_centers.resize(d.nr);
    v.shell_volume.assign(d.nr, 0.0);
    v.values.assign(d.nr, 0.0);
    for (int i = 0; i < d.nr; ++i) {
        v.r_centers[i] = m.center[i].r;
        v.values[i] = u_vals[i];  // ring-constant data
        for (int j = 0; j < d.nphi; ++j)
            v.shell_volume[i] += m.volume[static_cast<std::size_t>(j) * d.nr + i];
    }
    for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
        LpGap g = lp_gap(snap, m, v, 1.0, p);
        CHECK(g.gap() == Approx(0.0).margin(1e-12 * std::max(1.0, g.rhs)));
    }
}

TEST_CASE("mass identity: theta * U(A, t) equals the total mass of u") {
    DomainSpec d;
    d.kind = DomainKind::ConePolar;
    d.total_angle = kPi;
    d.radius = 1.0;
    d.nr = 20;
    d.nphi = 12;
    const double theta = theta_for_cone(kPi);
    MeshedDomain m = make_mesh(d, theta);
    auto f = evaluate_source(SourceSpec::constant(1.0), m, d, "f");
    auto g = evaluate_source(SourceSpec::gaussian(0.0, 0.3, 0.3), m, d, "g");
    auto snaps = solve_heat(m, f, g, {0.05, 0.3}, 5e-3);
    auto a_grid = uniform_a_grid(m.total_volume() / theta, 24);
    UScan scan = compute_U(snaps, m, theta, a_grid);
    for (std::size_t ti = 0; ti < snaps.size(); ++ti) {
        double mass = 0.0;
        for (std::size_t i = 0; i < m.volume.size(); ++i)
            mass += m.volume[i] * snaps[ti].values[i];
        CHECK(theta * scan.values[ti].back() == Approx(mass).epsilon(1e-12));
    }
}

TEST_CASE("t = 0 identity: U(a, 0) equals V(a, 0) from the rearranged data") {
    DomainSpec d;
    d.kind = DomainKind::ConePolar;
    d.total_angle = kPi;
    d.radius = 1.0;
    d.nr = 24;
    d.nphi = 16;
    const double theta = theta_for_cone(kPi);
    MeshedDomain m = make_mesh(d, theta);
    auto g = evaluate_source(SourceSpec::gaussian(0.2, 0.2, 0.3), m, d, "g");
    WeightedField gf = field_as_weighted({0.0, g}, m);
    SymmetrizationTarget target(m.model, theta);
    SymmetrizedProblem p = make_symmetrized_problem(gf, gf, target);
    StepFunction gstar = decreasing_rearrangement(gf);
    auto a_grid = uniform_a_grid(p.ball_volume_A, 50);
    for (double a : a_grid) {
        const double u0 = concentration(gstar, a, theta);
        const double v0 = initial_V(p, a);
        CHECK(u0 == Approx(v0).margin(1e-12 * std::max(1.0, v0)));
    }
}
