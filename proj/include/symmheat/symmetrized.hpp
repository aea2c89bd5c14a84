#pragma once

// The symmetrized problem on the model ball, solved two independent ways:
//
//   Route A: the radial heat equation v_t = v_rr + (n-1)(c'/c) v_r + f#(r)
//            on (0, R) with v(R) = 0 and the symmetry condition at r = 0,
//            as a finite-volume scheme weighted by the sphere area; V(a,t)
//            is recovered by rearranging the shell field and integrating.
//
//   Route B: the degenerate volume-coordinate equation
//            V_t = Phi^2(a) V'' + F(a) on (0, A), V(0,t) = 0, V'(A,t) = 0,
//            discretized directly on a uniform a-grid.
//
// Both march with implicit Euler and a tridiagonal (Thomas) solve. Route A
// is the reference; agreement of the two routes is itself a verification
// target.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "symmheat/geometry.hpp"
#include "symmheat/rearrangement.hpp"

namespace symmheat {

struct SymmetrizedProblem {
    SymmetrizationTarget target;
    double ball_volume_A = 0.0;  // |Omega#| = |Omega| / theta
    StepFunction f_sharp_star;   // (f#)* on [0, A]
    StepFunction g_sharp_star;   // (g#)* on [0, A]
};

// Builds the symmetrized problem from the domain data fields:
// (h#)*(s) = h*(theta s), i.e. h* with breakpoints stretched by 1/theta.
inline SymmetrizedProblem make_symmetrized_problem(const WeightedField& f,
                                                   const WeightedField& g,
                                                   const SymmetrizationTarget& target) {
    const double total = f.total_volume();
    if (std::abs(g.total_volume() - total) > 1e-9 * std::max(total, 1.0))
        throw std::domain_error("make_symmetrized_problem: f and g live on different volumes");
    const double A = total / target.theta;
    if (A > target.capacity * (1.0 + 1e-12))
        throw std::domain_error("make_symmetrized_problem: symmetrized ball exceeds capacity");
    const double inv_theta = 1.0 / target.theta;
    return SymmetrizedProblem{target, A,
                              decreasing_rearrangement(f).with_scaled_breaks(inv_theta),
                              decreasing_rearrangement(g).with_scaled_breaks(inv_theta)};
}

// F(a) = integral of (f#)* over [0, a]; concave, nondecreasing, F(0) = 0.
inline double source_concentration(const SymmetrizedProblem& p, double a) {
    if (a < -1e-14 || a > p.ball_volume_A * (1.0 + 1e-12))
        throw std::domain_error("source_concentration: a out of [0, A]");
    return p.f_sharp_star.integral(std::min(a, p.f_sharp_star.total_volume()));
}

// V(a, 0) = integral of (g#)* over [0, a].
inline double initial_V(const SymmetrizedProblem& p, double a) {
    if (a < -1e-14 || a > p.ball_volume_A * (1.0 + 1e-12))
        throw std::domain_error("initial_V: a out of [0, A]");
    return p.g_sharp_star.integral(std::min(a, p.g_sharp_star.total_volume()));
}

struct VSurface {
    std::vector<double> a_grid;               // 0 = a_0 < ... < a_K = A
    std::vector<double> times;                // snapshot times, all > 0
    std::vector<std::vector<double>> values;  // [time][a]

    double max_value() const {
        double m = 0.0;
        for (const auto& row : values)
            for (double v : row) m = std::max(m, v);
        return m;
    }
};

struct RadialSnapshot {
    double time = 0.0;
    std::vector<double> r_centers;
    std::vector<double> shell_volume;
    std::vector<double> values;

    double max_value() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, v);
        return m;
    }
};

struct RadialSolveResult {
    std::vector<RadialSnapshot> snapshots;
    VSurface surface;
};

inline std::vector<double> uniform_a_grid(double A, int cells) {
    std::vector<double> grid(cells + 1);
    for (int k = 0; k <= cells; ++k) grid[k] = A * static_cast<double>(k) / cells;
    grid.back() = A;
    return grid;
}

namespace symm_detail {

// Solves the tridiagonal system (lower, diag, upper) x = rhs in place.
inline void thomas_solve(std::vector<double>& lower, std::vector<double>& diag,
                         std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

inline void check_schedule(const std::vector<double>& times, double dt) {
    if (!(dt > 0.0)) throw std::domain_error("symmetrized solve: dt must be > 0");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev)) throw std::domain_error("symmetrized solve: times must be increasing, > 0");
        prev = t;
    }
}

}  // namespace symm_detail

// Route A. `resolution` is the number of radial cells; V is evaluated on
// `a_grid` by exact integration of the rearranged shell field.
inline RadialSolveResult solve_v_radial(const SymmetrizedProblem& p,
                                        const std::vector<double>& times,
                                        const std::vector<double>& a_grid, int resolution,
                                        double dt) {
    symm_detail::check_schedule(times, dt);
    if (resolution < 4) throw std::domain_error("solve_v_radial: resolution must be >= 4");
    const ModelSpace& model = p.target.model;
    const double A = p.ball_volume_A;
    const double R = ball_radius(model, A);
    const int n = resolution;
    const double dr = R / n;

    std::vector<double> rc(n), shell(n), flux(n + 1), f_src(n), v(n);
    for (int i = 0; i < n; ++i) {
        rc[i] = (i + 0.5) * dr;
        shell[i] = ball_volume(model, (i + 1) * dr) - ball_volume(model, i * dr);
        const double s = std::min(ball_volume(model, rc[i]), p.f_sharp_star.total_volume());
        f_src[i] = p.f_sharp_star.value_at(s);
        v[i] = p.g_sharp_star.value_at(std::min(ball_volume(model, rc[i]),
                                                p.g_sharp_star.total_volume()));
    }
    flux[0] = 0.0;  // symmetry at the center: the sphere area vanishes
    for (int i = 1; i < n; ++i) flux[i] = sphere_area(model, i * dr) / dr;
    flux[n] = sphere_area(model, R) / (0.5 * dr);  // Dirichlet face at r = R

    std::vector<double> lower(n), diag(n), upper(n), rhs(n);
    RadialSolveResult out;
    out.surface.a_grid = a_grid;
    out.surface.times = times;

    auto record = [&](double t) {
        std::vector<WeightedCell> cells(n);
        for (int i = 0; i < n; ++i) cells[i] = {shell[i], std::max(v[i], 0.0)};
        StepFunction star = decreasing_rearrangement(WeightedField(std::move(cells)));
        std::vector<double> row(a_grid.size());
        for (std::size_t k = 0; k < a_grid.size(); ++k)
            row[k] = star.integral(std::min(a_grid[k], star.total_volume()));
        out.surface.values.push_back(std::move(row));
        out.snapshots.push_back({t, rc, shell, v});
    };

    double t = 0.0;
    for (double target_t : times) {
        while (t < target_t - 1e-13 * std::max(1.0, target_t)) {
            const double step = std::min(dt, target_t - t);
            for (int i = 0; i < n; ++i) {
                lower[i] = (i > 0) ? -flux[i] : 0.0;
                upper[i] = (i + 1 < n) ? -flux[i + 1] : 0.0;
                diag[i] = shell[i] / step + flux[i] + flux[i + 1];
                rhs[i] = shell[i] * (v[i] / step + f_src[i]);
            }
            symm_detail::thomas_solve(lower, diag, upper, rhs);
            v = rhs;
            t += step;
        }
        t = target_t;
        record(target_t);
    }
    return out;
}

// Route B: V_t = Phi^2(a) V'' + F(a) on the uniform a-grid with
// resolution cells; Dirichlet pin V(0) = 0, second-order ghost for
// V'(A) = 0. The returned surface lives on that grid.
inline VSurface solve_V_direct(const SymmetrizedProblem& p, const std::vector<double>& times,
                               int resolution, double dt) {
    symm_detail::check_schedule(times, dt);
    if (resolution < 4) throw std::domain_error("solve_V_direct: resolution must be >= 4");
    const int K = resolution;
    const double A = p.ball_volume_A;
    const double da = A / K;

    std::vector<double> phi2(K + 1, 0.0), F(K + 1, 0.0), V(K + 1, 0.0);
    for (int k = 1; k <= K; ++k) {
        const double a = std::min(A * static_cast<double>(k) / K, A);
        phi2[k] = std::pow(isoperimetric_profile(p.target.model, a), 2);
        F[k] = source_concentration(p, a);
        V[k] = initial_V(p, a);
    }

    VSurface surf;
    surf.a_grid = uniform_a_grid(A, K);
    surf.times = times;

    std::vector<double> lower(K), diag(K), upper(K), rhs(K);  // unknowns k = 1..K
    double t = 0.0;
    for (double target_t : times) {
        while (t < target_t - 1e-13 * std::max(1.0, target_t)) {
            const double step = std::min(dt, target_t - t);
            for (int k = 1; k <= K; ++k) {
                const int i = k - 1;
                const double lam = phi2[k] / (da * da);
                if (k < K) {
                    lower[i] = (k > 1) ? -lam : 0.0;  // k = 1 couples to the pinned V_0 = 0
                    upper[i] = -lam;
                    diag[i] = 1.0 / step + 2.0 * lam;
                } else {
                    lower[i] = -2.0 * lam;  // ghost elimination: V_{K+1} = V_{K-1}
                    upper[i] = 0.0;
                    diag[i] = 1.0 / step + 2.0 * lam;
                }
                rhs[i] = V[k] / step + F[k];
            }
            symm_detail::thomas_solve(lower, diag, upper, rhs);
            for (int k = 1; k <= K; ++k) V[k] = rhs[k - 1];
            t += step;
        }
        t = target_t;
        surf.values.push_back(V);
    }
    return surf;
}

}  // namespace symmheat
