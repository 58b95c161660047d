#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "wch/kernels.hpp"

using namespace wch;

namespace {
const KernelTable& ktab(int n) {
    static KernelTable t1 = build_kernel_table(1);
    static KernelTable t2 = build_kernel_table(2);
    static KernelTable t3 = build_kernel_table(3);
    static KernelTable t4 = build_kernel_table(4);
    switch (n) {
        case 1: return t1;
        case 2: return t2;
        case 3: return t3;
        default: return t4;
    }
}
}  // namespace

TEST_CASE("profile value at the origin") {
    // oracle: Gamma(5/4) by quadrature (substituted t = x^4 to keep the
    // integrand smooth at 0), f_1(0) = sqrt(2/pi) Gamma(5/4)
    const double gamma54 =
        integrate([](double x) {
            const double x4 = x * x * x * x;
            return 4.0 * x4 * std::exp(-x4);
        }, 0.0, 8.0, 1e-13);
    CHECK(gamma54 == Catch::Approx(0.9064024770554771).margin(1e-10));
    const double f10 = std::sqrt(2.0 / kPi) * gamma54;
    CHECK(kernel_profile(1, 0.0) == Catch::Approx(f10).margin(1e-12));
    CHECK(f10 == Catch::Approx(0.723204).margin(1e-6));
}

TEST_CASE("odd-dimension closed reductions as oracles") {
    // n = 1: f_1(s) = sqrt(2/pi) int e^{-q^4} cos(sq) dq  (no Bessel machinery)
    for (double s : {0.3, 1.0, 2.7, 6.0}) {
        const double direct =
            std::sqrt(2.0 / kPi) *
            integrate([&](double q) { return std::exp(-q * q * q * q) * std::cos(s * q); },
                      0.0, 3.6, 1e-13);
        CHECK(kernel_profile(1, s) == Catch::Approx(direct).margin(1e-10));
    }
    // n = 3: f_3(s) = sqrt(2/pi) s^{-1} int q e^{-q^4} sin(sq) dq
    for (double s : {0.5, 1.5, 4.0}) {
        const double direct =
            std::sqrt(2.0 / kPi) / s *
            integrate(
                [&](double q) { return q * std::exp(-q * q * q * q) * std::sin(s * q); },
                0.0, 3.6, 1e-13);
        CHECK(kernel_profile(3, s) == Catch::Approx(direct).margin(1e-10));
    }
}

TEST_CASE("the kernel is sign-changing") {
    const KernelTable& t = ktab(1);
    bool flipped = false;
    for (std::size_t i = 1; i < t.f.size(); ++i)
        if (t.f[i] * t.f[i - 1] < 0.0) flipped = true;
    CHECK(flipped);
}

TEST_CASE("derivative recurrence f_n' = -s f_{n+2}") {
    for (int n = 1; n <= 4; ++n) {
        for (double s : {0.5, 2.0, 5.0}) {
            const double h = 1e-4;
            const double fd =
                (kernel_profile(n, s + h) - kernel_profile(n, s - h)) / (2.0 * h);
            CHECK(fd == Catch::Approx(-s * kernel_profile(n + 2, s)).margin(1e-5));
        }
    }
}

TEST_CASE("normalization against live quadrature") {
    for (int n = 1; n <= 4; ++n) {
        const KernelTable& t = ktab(n);
        const double mass =
            t.alpha_bar * unit_sphere_area(n) *
            integrate([&](double s) { return kernel_profile(n, s) * std::pow(s, n - 1.0); },
                      0.0, 44.0, 1e-9);
        CHECK(std::abs(mass - 1.0) < 1e-6);
        CHECK(t.abs_mass >= 1.0);  // sign-changing kernel
        // certified decay envelope
        CHECK(t.mu_fit > 0.0);
        for (std::size_t i = 0; i < t.f.size(); i += 17) {
            const double s = static_cast<double>(i) * t.ds;
            CHECK(std::abs(t.f[i]) <=
                  t.K_fit * std::exp(-t.mu_fit * std::pow(s, 4.0 / 3.0)) * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("constant initial data is preserved") {
    const KernelTable& t = ktab(1);
    Sampled1D u;
    u.x0 = -10.0;
    u.dx = 0.05;
    u.u.assign(401, 1.0);
    u.tails = TailRule::Constant;
    const Sampled1D v = heat_convolve(t, u, 0.7);
    for (std::size_t i = 0; i < v.size(); i += 13)
        CHECK(v.u[i] == Catch::Approx(1.0).margin(1e-9));
    // radial path, n = 2..4
    for (int n = 2; n <= 4; ++n) {
        for (double r : {0.0, 1.0, 3.0}) {
            const double m =
                heat_convolve_radial(ktab(n), n, [](double) { return 1.0; }, 1.0, r);
            CHECK(m == Catch::Approx(1.0).margin(1e-6));
        }
    }
}

TEST_CASE("semigroup property on a Gaussian") {
    const KernelTable& t = ktab(1);
    Sampled1D u;
    u.x0 = -30.0;
    u.dx = 0.06;
    u.u.resize(1001);
    for (std::size_t i = 0; i < u.size(); ++i)
        u.u[i] = std::exp(-0.5 * sq(u.x_at(i)));
    const Sampled1D once = heat_convolve(t, heat_convolve(t, u, 1.0), 1.0);
    const Sampled1D twice = heat_convolve(t, u, 2.0);
    double defect = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        defect = std::max(defect, std::abs(once.u[i] - twice.u[i]));
    CHECK(defect < 1e-6);
}

TEST_CASE("linearity") {
    const KernelTable& t = ktab(1);
    Sampled1D u, v;
    u.x0 = v.x0 = -8.0;
    u.dx = v.dx = 0.08;
    u.u.resize(201);
    v.u.resize(201);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u.u[i] = std::exp(-sq(u.x_at(i)));
        v.u[i] = std::sin(0.9 * v.x_at(i)) * std::exp(-0.3 * sq(v.x_at(i)));
    }
    Sampled1D w = u;
    for (std::size_t i = 0; i < u.size(); ++i) w.u[i] = 2.0 * u.u[i] - 3.0 * v.u[i];
    const Sampled1D a = heat_convolve(t, u, 0.5), b = heat_convolve(t, v, 0.5),
                    c = heat_convolve(t, w, 0.5);
    for (std::size_t i = 0; i < u.size(); i += 7)
        CHECK(c.u[i] == Catch::Approx(2.0 * a.u[i] - 3.0 * b.u[i]).margin(1e-12));
}

TEST_CASE("smoothing estimate: gradient gains t^{-1/4}") {
    const KernelTable& t = ktab(1);
    Sampled1D u;
    u.x0 = -20.0;
    u.dx = 0.04;
    u.u.resize(1001);
    for (std::size_t i = 0; i < u.size(); ++i) u.u[i] = (u.x_at(i) > 0.0) ? 1.0 : -1.0;
    u.tails = TailRule::Constant;
    double fitted[3];
    int k = 0;
    for (double tt : {0.1, 1.0, 10.0}) {
        const Sampled1D v = heat_convolve(t, u, tt);
        double grad = 0.0;
        for (std::size_t i = 1; i + 1 < v.size(); ++i)
            grad = std::max(grad, std::abs(v.u[i + 1] - v.u[i - 1]) / (2.0 * u.dx));
        fitted[k++] = grad * std::pow(tt, 0.25);  // / ||u0||_inf = 1
    }
    CHECK(fitted[0] > 0.0);
    CHECK(fitted[1] == Catch::Approx(fitted[0]).epsilon(0.25));
    CHECK(fitted[2] == Catch::Approx(fitted[1]).epsilon(0.25));
}

TEST_CASE("Q kernel") {
    const double alpha = std::sqrt(2.0);
    SECTION("positive at the center") {
        for (double nu : {0.1, 1.0, 10.0}) CHECK(q_kernel(alpha, nu, 0.0) > 0.0);
    }
    SECTION("unit mass") {
        for (double nu : {0.3, 2.0}) {
            const double mass = integrate(
                [&](double y) { return q_kernel(alpha, nu, y); }, -30.0, 30.0, 1e-10);
            CHECK(mass == Catch::Approx(1.0).margin(1e-8));
        }
    }
    SECTION("decay envelope over the test lattice") {
        double C = 0.0;
        for (double nu : {0.1, 1.0, 10.0}) {
            for (double y = 0.0; y <= 20.0; y += 1.0) {
                const double q = std::abs(q_kernel(alpha, nu, y));
                C = std::max(C, q * std::pow(nu, 0.25) * std::exp(y / std::pow(nu, 0.25)));
            }
        }
        CHECK(std::isfinite(C));
        CHECK(C < 1e4);
    }
}

TEST_CASE("Duhamel representation") {
    const double alpha = std::sqrt(2.0);
    SECTION("zero forcing") {
        auto f = [](double, double) { return 0.0; };
        const Sampled1D u = duhamel_1d(alpha, f, 1.0, 0.0, -5.0, 0.25, 41);
        for (double v : u.u) CHECK(v == 0.0);
    }
    SECTION("constant forcing solves the scalar ODE") {
        const double c = 0.7, T = 1.0, nu = -0.2;
        auto f = [&](double, double) { return c; };
        const double a4 = std::pow(alpha, 4.0);
        const double exact = c / a4 * (1.0 - std::exp(-a4 * (nu + T)));
        const Sampled1D u = duhamel_1d(alpha, f, T, nu, -40.0, 0.5, 161, 128);
        // interior nodes: away from the truncated convolution edges
        for (std::size_t i = 60; i <= 100; ++i)
            CHECK(u.u[i] == Catch::Approx(exact).margin(2e-4));
    }
    SECTION("residual of the PDE") {
        // u_nu + u_yyyy - 2 a^2 u_yy + a^4 u = f, smooth localized forcing
        auto f = [](double t, double y) {
            return std::exp(-0.5 * y * y) * (1.0 + 0.3 * t);
        };
        const double T = 0.6, dx = 0.2, dnu = 2e-3;
        const std::size_t nn = 161;
        const double x0 = -16.0;
        const Sampled1D um = duhamel_1d(alpha, f, T, -dnu, x0, dx, nn, 96);
        const Sampled1D u0 = duhamel_1d(alpha, f, T, 0.0, x0, dx, nn, 96);
        const Sampled1D up = duhamel_1d(alpha, f, T, dnu, x0, dx, nn, 96);
        double res = 0.0;
        for (std::size_t i = 30; i + 30 < nn; ++i) {
            const double ut = (up.u[i] - um.u[i]) / (2.0 * dnu);
            const double uyy = (u0.u[i - 1] - 2.0 * u0.u[i] + u0.u[i + 1]) / (dx * dx);
            const double uyyyy = (u0.u[i - 2] - 4.0 * u0.u[i - 1] + 6.0 * u0.u[i] -
                                  4.0 * u0.u[i + 1] + u0.u[i + 2]) /
                                 (dx * dx * dx * dx);
            const double a2 = alpha * alpha;
            res = std::max(res, std::abs(ut + uyyyy - 2.0 * a2 * uyy +
                                         a2 * a2 * u0.u[i] - f(0.0, u0.x_at(i))));
        }
        CHECK(res < 0.05);  // O(dx^2 + dtau) at this resolution
    }
}

TEST_CASE("mild solver") {
    const KernelTable& t = ktab(1);
    SECTION("zero right-hand side reduces to the semigroup") {
        Sampled1D u;
        u.x0 = -15.0;
        u.dx = 0.1;
        u.u.resize(301);
        for (std::size_t i = 0; i < u.size(); ++i)
            u.u[i] = std::exp(-0.5 * sq(u.x_at(i)));
        auto G = [](double, double, double, double, double) { return 0.0; };
        const MildResult r = mild_solve(t, G, 0.0, u, 0.0, 1.0);
        const Sampled1D ref = heat_convolve(t, u, 1.0);
        for (std::size_t i = 0; i < u.size(); i += 5)
            CHECK(r.u.u[i] == Catch::Approx(ref.u[i]).margin(1e-8));
    }
    SECTION("affine G = -u on flat data is the scalar exponential") {
        Sampled1D u;
        u.x0 = -24.0;
        u.dx = 0.4;
        u.u.assign(121, 1.0);
        u.tails = TailRule::Constant;
        auto G = [](double, double, double s, double, double) { return -s; };
        const MildResult r = mild_solve(t, G, 1.0, u, 0.0, 1.0);
        CHECK(r.windows >= 2);  // chained contraction windows
        for (std::size_t i = 30; i <= 90; ++i)
            CHECK(r.u.u[i] == Catch::Approx(std::exp(-1.0)).margin(1e-7));

        // halving the contraction window leaves the fixed point unchanged
        MildOptions half;
        half.window_scale = 0.5;
        const MildResult r2 = mild_solve(t, G, 1.0, u, 0.0, 1.0, half);
        for (std::size_t i = 30; i <= 90; ++i)
            CHECK(r2.u.u[i] == Catch::Approx(r.u.u[i]).margin(1e-9));
    }
}
