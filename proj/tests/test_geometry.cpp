#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "wch/geometry.hpp"

using namespace wch;

TEST_CASE("closed-form sphere radius") {
    CHECK(gamma_n(2, 8.0) == Catch::Approx(2.0).margin(1e-14));
    CHECK(gamma_n(4, -8.0) == Catch::Approx(std::pow(144.0, 0.25)).margin(1e-14));
    CHECK_THROWS_AS(gamma_n(3, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(gamma_n(1, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(gamma_n(2, -1.0), std::domain_error);
    CHECK_THROWS_AS(gamma_n(4, 1.0), std::domain_error);
}

TEST_CASE("radial Willmore right-hand side") {
    const double g4 = std::pow(144.0, 0.25);
    CHECK(willmore_rhs(4, g4) == Catch::Approx(-4.5 / cube(g4)).margin(1e-12));
    CHECK(willmore_rhs(2, 3.7) == Catch::Approx(0.5 / cube(3.7)).margin(1e-15));
    // n = 3: -27/(2 gamma^3) + ... cancels to zero -- stationary spheres
    for (double g : {0.5, 1.0, 5.0, 11.0}) CHECK(std::abs(willmore_rhs(3, g)) < 1e-14);
    CHECK_THROWS_AS(willmore_rhs(4, 0.0), std::domain_error);
}

TEST_CASE("closed form satisfies the ODE") {
    std::mt19937_64 rng(99);
    for (int n : {2, 4, 5, 6}) {
        std::uniform_real_distribution<double> dist(10.0, 1e4);
        for (int k = 0; k < 100; ++k) {
            double t = dist(rng);
            if (n >= 4) t = -t;
            const double h = 1e-3 * std::abs(t) * 1e-3;
            const double fd = (gamma_n(n, t + h) - gamma_n(n, t - h)) / (2.0 * h);
            CHECK(fd == Catch::Approx(willmore_rhs(n, gamma_n(n, t))).margin(1e-9));
            CHECK(gamma_n_dot(n, t) ==
                  Catch::Approx(willmore_rhs(n, gamma_n(n, t))).margin(1e-12));
        }
    }
}

TEST_CASE("RK4 trajectory against the closed form") {
    SECTION("shrinking ancient sphere, n = 4") {
        const auto curve = integrate_willmore(4, gamma_n(4, -100.0), -100.0, -10.0, 1e-3);
        double sup = 0.0;
        for (std::size_t k = 0; k < curve.gamma.size(); k += 997) {
            const double t = curve.t0 + static_cast<double>(k) * curve.dt;
            sup = std::max(sup, std::abs(curve.gamma[k] / gamma_n(4, t) - 1.0));
        }
        CHECK(sup < 1e-8);
        // monotone shrinking toward t = 0
        CHECK(curve.gamma.back() < curve.gamma.front());
    }
    SECTION("growing sphere, n = 2") {
        const auto curve = integrate_willmore(2, gamma_n(2, 1.0), 1.0, 100.0, 1e-3);
        CHECK(curve.gamma.back() ==
              Catch::Approx(std::pow(200.0, 0.25)).margin(1e-8));
        CHECK(curve.gamma.back() > curve.gamma.front());
    }
    SECTION("n = 3 stays put") {
        const auto curve = integrate_willmore(3, 5.0, 0.0, 2.0, 1e-3);
        for (double g : curve.gamma) CHECK(std::abs(g - 5.0) < 1e-12);
    }
}

TEST_CASE("sphere Willmore energy") {
    CHECK(willmore_energy_sphere(2, 1.0) == Catch::Approx(kPi).margin(1e-14));
    // n = 4 scales like gamma
    CHECK(willmore_energy_sphere(4, 3.0) / willmore_energy_sphere(4, 1.0) ==
          Catch::Approx(3.0).margin(1e-12));
    // n = 3: 8 pi independent of the radius (conformal invariance)
    for (double g : {0.3, 1.0, 7.0})
        CHECK(willmore_energy_sphere(3, g) == Catch::Approx(8.0 * kPi).margin(1e-12));
}
