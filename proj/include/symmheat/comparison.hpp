#pragma once

// Pairs the concentration scan U of the domain solution with the
// symmetrized surface V and renders the verdicts: the concentration
// comparison U <= V (up to the configured discretization tolerance), the
// L^p gaps, and the equality-case gap for ball scenarios.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "symmheat/heat_solver.hpp"
#include "symmheat/mesh.hpp"
#include "symmheat/rearrangement.hpp"
#include "symmheat/symmetrized.hpp"

namespace symmheat {

struct UScan {
    std::vector<double> a_grid;
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // [time][a]
    double theta = 1.0;

    double max_value() const {
        double m = 0.0;
        for (const auto& row : values)
            for (double v : row) m = std::max(m, v);
        return m;
    }
};

// U(a, t) = (1/theta) * integral of u*(., t) over [0, theta a], exact per
// snapshot on the rearranged step function.
inline UScan compute_U(const std::vector<FieldSnapshot>& snapshots, const MeshedDomain& mesh,
                       double theta, const std::vector<double>& a_grid) {
    UScan scan;
    scan.a_grid = a_grid;
    scan.theta = theta;
    const double total = mesh.total_volume();
    if (!a_grid.empty() && theta * a_grid.back() > total + 1e-12 * std::max(total, 1.0))
        throw std::domain_error("compute_U: theta * a exceeds the domain volume");
    for (const auto& snap : snapshots) {
        StepFunction star = decreasing_rearrangement(field_as_weighted(snap, mesh));
        std::vector<double> row(a_grid.size());
        for (std::size_t k = 0; k < a_grid.size(); ++k) {
            const double upto = std::min(theta * a_grid[k], star.total_volume());
            row[k] = star.integral(upto) / theta;
        }
        scan.times.push_back(snap.time);
        scan.values.push_back(std::move(row));
    }
    return scan;
}

struct LpGap {
    double time = 0.0;
    double p = 1.0;  // +inf for the sup norm
    double lhs = 0.0;
    double rhs = 0.0;
    double gap() const { return lhs - rhs; }
};

// ((1/theta) integral u^p)^(1/p) against the same norm of v on the ball;
// p = +inf compares the maxima.
inline LpGap lp_gap(const FieldSnapshot& u, const MeshedDomain& mesh,
                    const RadialSnapshot& v, double theta, double p) {
    if (!(p >= 1.0)) throw std::domain_error("lp_gap: p must be >= 1");
    LpGap out;
    out.time = u.time;
    out.p = p;
    if (std::isinf(p)) {
        out.lhs = std::max(u.max_value(), 0.0);
        out.rhs = v.max_value();
        return out;
    }
    double lu = 0.0, lv = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
        lu += mesh.volume[i] * std::pow(std::max(u.values[i], 0.0), p);
    for (std::size_t i = 0; i < v.values.size(); ++i)
        lv += v.shell_volume[i] * std::pow(std::max(v.values[i], 0.0), p);
    out.lhs = std::pow(lu / theta, 1.0 / p);
    out.rhs = std::pow(lv, 1.0 / p);
    return out;
}

struct ComparisonReport {
    std::vector<double> times;
    std::vector<double> per_time_max_gap;  // max over a of U - V
    double global_max_gap = -std::numeric_limits<double>::infinity();
    std::vector<LpGap> lp_gaps;
    double lp_rel_tol = 1e-2;
    double tolerance = 0.0;
    double max_V = 0.0;
    double max_U = 0.0;
    bool equality_flagged = false;
    double equality_gap = std::numeric_limits<double>::quiet_NaN();
    double equality_tolerance = std::numeric_limits<double>::quiet_NaN();
    double u_star_at_full_volume = 0.0;  // informational; see summary
    bool dmp_warning = false;

    // Location of the worst gap, for diagnostics.
    double argmax_a = 0.0, argmax_t = 0.0;

    bool gaps_pass() const { return global_max_gap <= tolerance; }
    bool lp_pass() const {
        for (const auto& g : lp_gaps)
            if (g.lhs > g.rhs + lp_rel_tol * g.rhs + 1e-14) return false;
        return true;
    }
    bool equality_pass() const {
        return !equality_flagged || equality_gap <= equality_tolerance;
    }
    bool pass() const { return gaps_pass() && lp_pass() && equality_pass(); }
};

// Exact grid maxima of U - V. The two surfaces must share the same grid;
// a mismatch is a configuration error, never silently interpolated.
inline ComparisonReport compare(const UScan& u, const VSurface& v, double tolerance) {
    if (u.a_grid != v.a_grid || u.times != v.times)
        throw std::invalid_argument("compare: U and V must share the same (a, t) grid");
    ComparisonReport report;
    report.times = u.times;
    report.tolerance = tolerance;
    report.max_V = v.max_value();
    report.max_U = u.max_value();
    for (std::size_t ti = 0; ti < u.times.size(); ++ti) {
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < u.a_grid.size(); ++k) {
            const double gap = u.values[ti][k] - v.values[ti][k];
            if (gap > worst) worst = gap;
            if (gap > report.global_max_gap) {
                report.global_max_gap = gap;
                report.argmax_a = u.a_grid[k];
                report.argmax_t = u.times[ti];
            }
        }
        report.per_time_max_gap.push_back(worst);
    }
    return report;
}

// Equality-case gap: max over the grid of |U - V|. Only meaningful for
// ball scenarios with radial data; the scenario layer validates the flag.
inline double equality_case_check(const UScan& u, const VSurface& v) {
    if (u.a_grid != v.a_grid || u.times != v.times)
        throw std::invalid_argument("equality_case_check: mismatched grids");
    double worst = 0.0;
    for (std::size_t ti = 0; ti < u.times.size(); ++ti)
        for (std::size_t k = 0; k < u.a_grid.size(); ++k)
            worst = std::max(worst, std::abs(u.values[ti][k] - v.values[ti][k]));
    return worst;
}

// Shape diagnostics shared by tests and the acceptance suite: a surface
// row must be nondecreasing and concave in a.
inline double max_monotonicity_violation(const std::vector<double>& a,
                                         const std::vector<double>& row) {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < row.size(); ++k)
        worst = std::max(worst, row[k] - row[k + 1]);
    (void)a;
    return worst;
}

// Positive part of the largest second difference (uniform grids; general
// grids are compared through slopes).
inline double max_concavity_violation(const std::vector<double>& a,
                                      const std::vector<double>& row) {
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < row.size(); ++k) {
        const double hl = a[k] - a[k - 1], hr = a[k + 1] - a[k];
        const double second = (row[k + 1] - row[k]) / hr - (row[k] - row[k - 1]) / hl;
        worst = std::max(worst, second * std::min(hl, hr));
    }
    return worst;
}

}  // namespace symmheat
