#ifndef WCH_GEOMETRY_HPP
#define WCH_GEOMETRY_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "wch/errors.hpp"
#include "wch/numerics.hpp"

namespace wch {

// Willmore flow of round spheres in R^n. The radius obeys
//   gamma' = -((n-1)/gamma)^3 / 2 + (n-1)^2 / gamma^3,
// with closed-form solution gamma^4 = -2(n-3)(n-1)^2 t. The flow expands for
// n = 2 (t >= 0), shrinks for n >= 4 (t <= 0), and is stationary for n = 3.

inline void check_dimension(int n) {
    if (n == 1 || n == 3)
        throw std::invalid_argument(
            "degenerate dimension: spheres are stationary for n in {1,3}");
    if (n < 1 || n > 12) throw std::invalid_argument("dimension must be in 1..12");
}

inline double gamma_n(int n, double t) {
    check_dimension(n);
    if ((n == 2 && t < 0.0) || (n >= 4 && t > 0.0))
        throw std::domain_error("gamma_n: sign of t incompatible with dimension");
    return std::pow(-2.0 * (n - 3) * sq(static_cast<double>(n - 1)) * t, 0.25);
}

// d gamma_n / dt along the closed form: -(n-3)(n-1)^2 / (2 gamma^3).
inline double gamma_n_dot(int n, double t) {
    const double g = gamma_n(n, t);
    return -0.5 * (n - 3) * sq(static_cast<double>(n - 1)) / cube(g);
}

inline double willmore_rhs(int n, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("willmore_rhs: gamma must be positive");
    if (n < 1 || n > 12) throw std::invalid_argument("dimension must be in 1..12");
    const double m = n - 1;
    return -0.5 * cube(m / gamma) + m * m / cube(gamma);
}

struct RadiusCurve {
    double t0 = 0.0, dt = 0.0;
    std::vector<double> gamma;  // gamma[k] at t0 + k*dt
    double at(double t) const {
        const auto k = static_cast<std::size_t>(std::llround((t - t0) / dt));
        return gamma.at(k);
    }
};

// Classical RK4 on gamma' = willmore_rhs(n, gamma).
inline RadiusCurve integrate_willmore(int n, double gamma0, double t0, double t1,
                                      double dt) {
    if (!(gamma0 > 0.0)) throw std::domain_error("integrate_willmore: gamma0 > 0");
    if (!(dt > 0.0) || (t1 - t0) / dt < 1e3)
        throw std::invalid_argument("integrate_willmore: need dt > 0 with >= 1e3 steps");
    const double floor = 1e-6;
    RadiusCurve out;
    out.t0 = t0;
    out.dt = dt;
    const auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / dt - 1e-12));
    out.gamma.reserve(steps + 1);
    double g = gamma0;
    out.gamma.push_back(g);
    for (std::size_t k = 0; k < steps; ++k) {
        const double h = std::min(dt, t1 - (t0 + static_cast<double>(k) * dt));
        const double k1 = willmore_rhs(n, g);
        const double k2 = willmore_rhs(n, g + 0.5 * h * k1);
        const double k3 = willmore_rhs(n, g + 0.5 * h * k2);
        const double k4 = willmore_rhs(n, g + h * k3);
        g += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(g > floor))
            throw ExtinctionError("integrate_willmore: radius crossed floor at t = " +
                                  std::to_string(t0 + (k + 1) * dt));
        out.gamma.push_back(g);
    }
    return out;
}

// (1/2) |S^{n-1}| gamma^{n-1} ((n-1)/gamma)^2 -- squared mean curvature of the
// round sphere integrated over its area.
inline double willmore_energy_sphere(int n, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("willmore_energy_sphere: gamma > 0");
    const double m = n - 1;
    return 0.5 * unit_sphere_area(n) * std::pow(gamma, m) * sq(m / gamma);
}

}  // namespace wch

#endif
