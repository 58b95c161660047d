#ifndef WCH_BESSEL_HPP
#define WCH_BESSEL_HPP

#include <cmath>
#include <stdexcept>

#include "wch/numerics.hpp"

namespace wch {

namespace detail {

// Ascending series for integer order, adequate for x <= 12 in double
// (worst cancellation there loses ~5 digits, leaving ~1e-11 absolute).
inline double bessel_j_series(int nu, double x) {
    const double hx = 0.5 * x;
    double term = 1.0;
    for (int k = 1; k <= nu; ++k) term *= hx / k;  // (x/2)^nu / nu!
    double sum = term;
    const double m = -hx * hx;
    for (int k = 1; k <= 64; ++k) {
        term *= m / (k * (k + nu));
        sum += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    }
    return sum;
}

// Hankel asymptotic expansion for large argument, any real order.
inline double bessel_j_asym(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double p = 1.0, q = 0.0;
    double term = 1.0;
    // P: even terms, Q: odd terms of the 1/(8x) series
    for (int k = 1; k <= 12; ++k) {
        term *= (mu - sq(2.0 * k - 1.0)) / (k * 8.0 * x);
        if (k % 2 == 1)
            q += (k % 4 == 1) ? term : -term;
        else
            p += (k % 4 == 2) ? -term : term;
        if (std::abs(term) < 1e-17) break;
    }
    const double chi = x - (0.5 * nu + 0.25) * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace detail

// J_nu(x) for x >= 0 and the orders used by the radial kernel profiles:
// nu = k/2 with k = -1..6. Half-integers use closed forms, integers a
// series/asymptotic split at x = 12.
inline double bessel_j(double nu, double x) {
    if (x < 0) throw std::invalid_argument("bessel_j: x < 0");
    const double k2 = 2.0 * nu;
    const bool half = std::abs(k2 - std::round(k2)) < 1e-12 &&
                      std::abs(nu - std::round(nu)) > 0.25;
    if (half) {
        if (x == 0.0) return (nu < 0) ? std::numeric_limits<double>::infinity() : 0.0;
        const double f = std::sqrt(2.0 / (kPi * x));
        const double s = std::sin(x), c = std::cos(x);
        if (nu < 0.0) return f * c;  // J_{-1/2}
        if (nu < 1.0) return f * s;  // J_{1/2}
        if (nu < 2.0) {              // J_{3/2}
            if (x < 0.5) {
                // sin(x)/x - cos(x) by series, avoiding cancellation
                double t = x * x / 3.0, sum = t;
                double x2 = x * x;
                // next terms of x^2/3 - x^4/30 + x^6/840 - ...
                t *= -x2 / 10.0; sum += t;
                t *= -x2 / 28.0; sum += t;
                t *= -x2 / 54.0; sum += t;
                t *= -x2 / 88.0; sum += t;
                return f * sum;
            }
            return f * (s / x - c);
        }
        // J_{5/2} explicit form, series for small x
        if (x < 0.5) {
            // (3/x^2 - 1) sin x - 3 cos x / x = x^3/15 - x^5/210 + x^7/7560 - ...
            const double x2 = x * x;
            double t = x * x2 / 15.0, sum = t;
            t *= -x2 / 14.0; sum += t;
            t *= -x2 / 36.0; sum += t;
            t *= -x2 / 66.0; sum += t;
            t *= -x2 / 104.0; sum += t;
            return f * sum;
        }
        return f * ((3.0 / (x * x) - 1.0) * s - 3.0 * c / x);
    }
    const int n = static_cast<int>(std::lround(nu));
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    if (x <= 12.0) return detail::bessel_j_series(n, x);
    if (n <= 1) return detail::bessel_j_asym(n, x);
    // upward recurrence is stable here since x > 12 >= nu
    double jm = detail::bessel_j_asym(0.0, x);
    double j = detail::bessel_j_asym(1.0, x);
    for (int k = 1; k < n; ++k) {
        const double jn = (2.0 * k / x) * j - jm;
        jm = j;
        j = jn;
    }
    return j;
}

}  // namespace wch

#endif
