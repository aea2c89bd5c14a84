#pragma once

// Model-space geometry for the symmetrization target M_kappa: Euclidean
// space (kappa = 0) or the round sphere of curvature kappa > 0. Geodesic
// ball volumes, sphere areas, their inverse, and the isoperimetric profile
// Phi(s) = area of the geodesic sphere enclosing volume s.
//
// Conventions: n >= 2 is the model dimension, r is geodesic radius, and
// for kappa > 0 the valid radius range is [0, pi/sqrt(kappa)].

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace symmheat {

inline constexpr double kPi = 3.14159265358979323846;

struct ModelSpace {
    double kappa = 0.0;  // sectional curvature, >= 0
    int n = 2;           // dimension, >= 2

    ModelSpace() = default;
    ModelSpace(double kappa_, int n_) : kappa(kappa_), n(n_) {
        if (!(kappa >= 0.0) || !std::isfinite(kappa))
            throw std::domain_error("ModelSpace: kappa must be finite and >= 0");
        if (n < 2) throw std::domain_error("ModelSpace: dimension must be >= 2");
    }

    bool spherical() const { return kappa > 0.0; }
    // Largest admissible geodesic radius.
    double max_radius() const {
        return spherical() ? kPi / std::sqrt(kappa)
                           : std::numeric_limits<double>::infinity();
    }
};

// Volume of the unit ball in R^n, via the two-step recurrence
// w_n = w_{n-2} * 2*pi/n (exact for integer n, no Gamma evaluation).
inline double unit_ball_volume(int n) {
    if (n < 0) throw std::domain_error("unit_ball_volume: n must be >= 0");
    double even = 1.0;  // w_0
    double odd = 2.0;   // w_1
    for (int k = 2; k <= n; ++k) {
        if (k % 2 == 0)
            even *= 2.0 * kPi / k;
        else
            odd *= 2.0 * kPi / k;
    }
    return (n % 2 == 0) ? even : odd;
}

// sn_kappa(r): the metric warping factor, r for kappa = 0 and
// sin(sqrt(kappa) r)/sqrt(kappa) for kappa > 0.
inline double space_form_sine(double kappa, double r) {
    if (kappa <= 0.0) return r;
    const double sk = std::sqrt(kappa);
    return std::sin(sk * r) / sk;
}

namespace detail {

// I_k(x) = integral of sin^k(t) over [0, x], by the reduction formula
// I_k = ((k-1) I_{k-2} - sin^{k-1}(x) cos(x)) / k.
inline double sin_power_integral(int k, double x) {
    double i_even = x;                 // I_0
    double i_odd = 1.0 - std::cos(x);  // I_1
    if (k == 0) return i_even;
    if (k == 1) return i_odd;
    const double s = std::sin(x), c = std::cos(x);
    double spow = s;  // sin^{m-1}(x) while computing I_m for m = 2,3,...
    double result = 0.0;
    for (int m = 2; m <= k; ++m) {
        double prev = (m % 2 == 0) ? i_even : i_odd;
        result = ((m - 1) * prev - spow * c) / m;
        if (m % 2 == 0)
            i_even = result;
        else
            i_odd = result;
        spow *= s;
    }
    return result;
}

inline void check_radius(const ModelSpace& m, double r) {
    if (!(r >= 0.0))
        throw std::domain_error("geodesic radius must be >= 0");
    if (m.spherical() && r > m.max_radius() * (1.0 + 1e-14))
        throw std::domain_error("geodesic radius exceeds pi/sqrt(kappa)");
}

}  // namespace detail

// |B_r| in M_kappa. Strictly increasing on the valid radius range.
inline double ball_volume(const ModelSpace& m, double r) {
    detail::check_radius(m, r);
    const double wn = unit_ball_volume(m.n);
    if (!m.spherical()) return wn * std::pow(r, m.n);
    const double sk = std::sqrt(m.kappa);
    const double x = std::min(sk * r, kPi);
    return m.n * wn * std::pow(m.kappa, -0.5 * m.n) *
           detail::sin_power_integral(m.n - 1, x);
}

// Total volume of M_kappa (+inf for the flat model).
inline double model_volume(const ModelSpace& m) {
    if (!m.spherical()) return std::numeric_limits<double>::infinity();
    return ball_volume(m, m.max_radius());
}

// (n-1)-area of the geodesic sphere of radius r.
inline double sphere_area(const ModelSpace& m, double r) {
    detail::check_radius(m, r);
    const double wn = unit_ball_volume(m.n);
    return m.n * wn * std::pow(space_form_sine(m.kappa, r), m.n - 1);
}

// Inverse of ball_volume. Closed form for kappa = 0; bisection to 1e-13
// absolute in r (200-iteration cap) for the sphere.
inline double ball_radius(const ModelSpace& m, double v) {
    if (!(v >= 0.0)) throw std::domain_error("ball_radius: volume must be >= 0");
    if (!m.spherical()) {
        return std::pow(v / unit_ball_volume(m.n), 1.0 / m.n);
    }
    const double total = model_volume(m);
    if (v > total * (1.0 + 1e-14))
        throw std::domain_error("ball_radius: volume exceeds |M_kappa|");
    if (v >= total) return m.max_radius();
    double lo = 0.0, hi = m.max_radius();
    for (int it = 0; it < 200 && (hi - lo) > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ball_volume(m, mid) < v ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Phi(s): boundary area of the geodesic ball of volume s. Monotone
// increasing in s for kappa = 0; on the sphere increasing up to the
// hemisphere volume and decreasing beyond (used as defined everywhere).
inline double isoperimetric_profile(const ModelSpace& m, double s) {
    if (!(s > 0.0)) throw std::domain_error("isoperimetric_profile: s must be > 0");
    return sphere_area(m, ball_radius(m, s));
}

// Volume ratio of a flat cone of the given total angle: angle / 2*pi.
inline double theta_for_cone(double total_angle) {
    if (!(total_angle > 0.0) || total_angle > 2.0 * kPi * (1.0 + 1e-14))
        throw std::domain_error("theta_for_cone: total angle must lie in (0, 2*pi]");
    return std::min(total_angle / (2.0 * kPi), 1.0);
}

// The comparison target: model space, volume ratio theta, and the total
// admissible volume for symmetrized balls.
struct SymmetrizationTarget {
    ModelSpace model;
    double theta = 1.0;
    double capacity = std::numeric_limits<double>::infinity();

    SymmetrizationTarget() = default;
    SymmetrizationTarget(const ModelSpace& model_, double theta_)
        : model(model_), theta(theta_), capacity(model_volume(model_)) {
        if (!(theta > 0.0) || theta > 1.0 + 1e-14)
            throw std::domain_error("SymmetrizationTarget: theta must lie in (0, 1]");
        theta = std::min(theta, 1.0);
    }
};

}  // namespace symmheat
