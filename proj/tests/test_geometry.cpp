#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "symmheat/geometry.hpp"

using namespace symmheat;

TEST_CASE("unit ball volumes match the closed forms") {
    CHECK(unit_ball_volume(2) == Approx(kPi).epsilon(1e-15));
    CHECK(unit_ball_volume(3) == Approx(4.0 * kPi / 3.0).epsilon(1e-15));
    CHECK(unit_ball_volume(4) == Approx(kPi * kPi / 2.0).epsilon(1e-15));
    CHECK(unit_ball_volume(5) == Approx(8.0 * kPi * kPi / 15.0).epsilon(1e-15));
}

TEST_CASE("ball volumes in the flat and spherical models") {
    CHECK(ball_volume(ModelSpace(0, 2), 1.0) == Approx(kPi).epsilon(1e-14));
    CHECK(ball_volume(ModelSpace(1, 2), kPi) == Approx(4.0 * kPi).epsilon(1e-14));
    CHECK(ball_volume(ModelSpace(0, 3), 2.0) == Approx(32.0 * kPi / 3.0).epsilon(1e-14));
    // Spherical cap area 2*pi*(1 - cos r) on the unit sphere.
    for (double r : {0.3, 1.0, 2.0, 3.0})
        CHECK(ball_volume(ModelSpace(1, 2), r) ==
              Approx(2.0 * kPi * (1.0 - std::cos(r))).epsilon(1e-13));
    // Unit 3-sphere ball: pi * (2r - sin(2r)).
    for (double r : {0.5, 1.5, 2.5})
        CHECK(ball_volume(ModelSpace(1, 3), r) ==
              Approx(kPi * (2.0 * r - std::sin(2.0 * r))).epsilon(1e-13));
    CHECK(ball_volume(ModelSpace(0, 2), 0.0) == 0.0);
    CHECK_THROWS_AS(ball_volume(ModelSpace(1, 2), 3.2), std::domain_error);
    CHECK_THROWS_AS(ball_volume(ModelSpace(0, 2), -0.1), std::domain_error);
}

TEST_CASE("ball radius inverts ball volume") {
    CHECK(ball_radius(ModelSpace(0, 2), kPi) == Approx(1.0).epsilon(1e-14));
    CHECK(ball_radius(ModelSpace(1, 2), 2.0 * kPi) == Approx(kPi / 2.0).epsilon(1e-12));
    CHECK(ball_radius(ModelSpace(0, 2), 4.0 * kPi) == Approx(2.0).epsilon(1e-14));
    CHECK_THROWS_AS(ball_radius(ModelSpace(0, 2), -1.0), std::domain_error);
    CHECK_THROWS_AS(ball_radius(ModelSpace(1, 2), 4.0 * kPi + 1.0), std::domain_error);
}

TEST_CASE("round trip: volume -> radius -> volume within 1e-12") {
    auto gen = oracle::rng(20240811);
    for (int n = 2; n <= 5; ++n) {
        for (double kappa : {0.0, 1.0, 2.5}) {
            ModelSpace m(kappa, n);
            const double cap = m.spherical() ? model_volume(m) : 50.0;
            std::uniform_real_distribution<double> dist(0.0, cap);
            for (int i = 0; i < 1000 / 4; ++i) {
                const double v = dist(gen);
                const double back = ball_volume(m, ball_radius(m, v));
                CHECK(std::abs(back - v) <= 1e-12 * std::max(v, 1.0));
            }
        }
    }
}

TEST_CASE("sphere areas") {
    CHECK(sphere_area(ModelSpace(0, 2), 1.0) == Approx(2.0 * kPi).epsilon(1e-14));
    CHECK(sphere_area(ModelSpace(1, 2), kPi / 2.0) == Approx(2.0 * kPi).epsilon(1e-14));
    CHECK(sphere_area(ModelSpace(0, 3), 1.0) == Approx(4.0 * kPi).epsilon(1e-14));
}

TEST_CASE("isoperimetric profile values and flat closed form") {
    CHECK(isoperimetric_profile(ModelSpace(0, 2), kPi) == Approx(2.0 * kPi).epsilon(1e-13));
    CHECK(isoperimetric_profile(ModelSpace(0, 3), 4.0 * kPi / 3.0) ==
          Approx(4.0 * kPi).epsilon(1e-13));
    CHECK(isoperimetric_profile(ModelSpace(1, 2), 2.0 * kPi) == Approx(2.0 * kPi).epsilon(1e-12));
    CHECK_THROWS_AS(isoperimetric_profile(ModelSpace(0, 2), 0.0), std::domain_error);

    auto gen = oracle::rng(7);
    std::uniform_real_distribution<double> sdist(1e-6, 30.0);
    std::uniform_int_distribution<int> ndist(2, 6);
    for (int i = 0; i < 100; ++i) {
        const int n = ndist(gen);
        const double s = sdist(gen);
        ModelSpace m(0.0, n);
        const double wn = unit_ball_volume(n);
        const double closed = n * std::pow(wn, 1.0 / n) * std::pow(s, (n - 1.0) / n);
        CHECK(isoperimetric_profile(m, s) == Approx(closed).epsilon(1e-12));
    }
}

TEST_CASE("profile is monotone increasing below the hemisphere volume") {
    auto gen = oracle::rng(11);
    for (double kappa : {0.0, 1.0}) {
        ModelSpace m(kappa, 2);
        const double cap = m.spherical() ? 0.5 * model_volume(m) : 40.0;
        std::uniform_real_distribution<double> dist(1e-9, cap);
        for (int i = 0; i < 200; ++i) {
            double s1 = dist(gen), s2 = dist(gen);
            if (s1 > s2) std::swap(s1, s2);
            if (s1 == s2) continue;
            CHECK(isoperimetric_profile(m, s1) < isoperimetric_profile(m, s2));
        }
    }
}

TEST_CASE("cone volume ratio") {
    CHECK(theta_for_cone(2.0 * kPi) == Approx(1.0));
    CHECK(theta_for_cone(kPi) == Approx(0.5));
    CHECK(theta_for_cone(kPi / 2.0) == Approx(0.25));
    CHECK_THROWS_AS(theta_for_cone(0.0), std::domain_error);
    CHECK_THROWS_AS(theta_for_cone(7.0), std::domain_error);
}

TEST_CASE("symmetrization target validates theta and capacity") {
    SymmetrizationTarget flat(ModelSpace(0, 2), 0.5);
    CHECK(std::isinf(flat.capacity));
    SymmetrizationTarget sphere(ModelSpace(1, 2), 1.0);
    CHECK(sphere.capacity == Approx(4.0 * kPi).epsilon(1e-13));
    CHECK_THROWS_AS(SymmetrizationTarget(ModelSpace(0, 2), 0.0), std::domain_error);
    CHECK_THROWS_AS(SymmetrizationTarget(ModelSpace(0, 2), 1.5), std::domain_error);
    CHECK_THROWS_AS(ModelSpace(-1.0, 2), std::domain_error);
    CHECK_THROWS_AS(ModelSpace(0.0, 1), std::domain_error);
}
