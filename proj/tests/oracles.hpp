#pragma once

// Independent reference implementations used as test oracles. Everything
// here is deliberately written from the defining formulas (brute force,
// series, closed forms), not by calling the library code it checks.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

// ---- rearrangement oracles -------------------------------------------

struct Cell {
    double volume;
    double value;
};

// mu_h(s) by direct summation.
inline double mu(const std::vector<Cell>& cells, double s) {
    double m = 0.0;
    for (const auto& c : cells)
        if (c.value > s) m += c.volume;
    return m;
}

// h*(s) from the inf-formula: h*(0) = max value, otherwise
// inf{t >= 0 : mu(t) < s}, scanning candidate levels in ascending order.
inline double rearranged_value(const std::vector<Cell>& cells, double s) {
    double maxv = 0.0;
    for (const auto& c : cells) maxv = std::max(maxv, c.value);
    if (s <= 0.0) return maxv;
    std::vector<double> levels{0.0};
    for (const auto& c : cells) levels.push_back(c.value);
    std::sort(levels.begin(), levels.end());
    for (double t : levels)
        if (mu(cells, t) < s) return t;
    return maxv;
}

// Rearrangement (Hardy-Littlewood) pairing upper bound for fields on
// equal-volume cells: sort both descending and take the dot product.
inline double sorted_product(std::vector<double> f, std::vector<double> g, double cell_volume) {
    std::sort(f.begin(), f.end(), std::greater<>());
    std::sort(g.begin(), g.end(), std::greater<>());
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * g[i];
    return acc * cell_volume;
}

// ---- heat equation closed forms --------------------------------------

// Separated solution of u_t = Laplacian(u) on the unit square with
// u(x, y, 0) = sin(pi x) sin(pi y).
inline double square_eigenmode(double x, double y, double t) {
    return std::exp(-2.0 * kPi * kPi * t) * std::sin(kPi * x) * std::sin(kPi * y);
}

// Torsion function of the unit square (-Laplacian w = 1, w = 0 on the
// boundary) by its double Fourier sine series; converges absolutely.
inline double square_torsion(double x, double y, int terms = 399) {
    const double pi4 = kPi * kPi * kPi * kPi;
    double acc = 0.0;
    for (int m = 1; m <= terms; m += 2)
        for (int n = 1; n <= terms; n += 2)
            acc += 16.0 / (pi4 * m * n * (static_cast<double>(m) * m + static_cast<double>(n) * n)) *
                   std::sin(m * kPi * x) * std::sin(n * kPi * y);
    return acc;
}

// Disc torsion closed forms on the unit disc.
inline double disc_torsion(double r) { return (1.0 - r * r) / 4.0; }
inline double disc_torsion_rearranged(double s) { return (1.0 - s / kPi) / 4.0; }
inline double disc_torsion_concentration(double a) { return a / 4.0 - a * a / (8.0 * kPi); }

// ---- Bessel oracle -----------------------------------------------------

inline double bessel_j0(double z) {
    const double q = 0.25 * z * z;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 60; ++k) {
        term *= -q / (static_cast<double>(k) * k);
        sum += term;
    }
    return sum;
}

// First zero of J0 by Newton refinement of the series (J0' = -J1).
inline double bessel_j0_first_zero() {
    auto j1 = [](double z) {
        const double q = 0.25 * z * z;
        double term = 0.5 * z, sum = term;
        for (int k = 1; k <= 60; ++k) {
            term *= -q / (static_cast<double>(k) * (k + 1));
            sum += term;
        }
        return sum;
    };
    double z = 2.4;
    for (int it = 0; it < 50; ++it) z += bessel_j0(z) / j1(z);
    return z;
}

// ---- misc --------------------------------------------------------------

// Geodesic-ball volume on a flat cone of total angle alpha.
inline double cone_ball_volume(double alpha, double r) { return 0.5 * alpha * r * r; }

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

}  // namespace oracle
