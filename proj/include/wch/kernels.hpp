#ifndef WCH_KERNELS_HPP
#define WCH_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "wch/bessel.hpp"
#include "wch/errors.hpp"
#include "wch/numerics.hpp"

namespace wch {

// ---------------------------------------------------------------------------
// Biharmonic heat kernel profile f_n and its sampled table.
// ---------------------------------------------------------------------------

// f_n(s) = s^{1-n} int_0^inf e^{-q^4} (s q)^{n/2} J_{(n-2)/2}(s q) dq.
// The e^{-q^4} damping confines the integral to q < 3.6; the Bessel factor
// oscillates at most a dozen times there for s <= 20.
inline double kernel_profile(int n, double s) {
    if (n < 1) throw std::invalid_argument("kernel_profile: n >= 1");
    if (s < 0.0) throw std::domain_error("kernel_profile: s >= 0");
    if (s == 0.0)
        return std::pow(2.0, 0.5 * (2 - n)) * std::tgamma(0.25 * n) /
               (4.0 * std::tgamma(0.5 * n));
    const double nu = 0.5 * (n - 2);
    const double pre = std::pow(s, 1.0 - n);
    auto g = [&](double q) {
        const double x = s * q;
        double bess;
        if (x < 1e-8) {
            // small-argument limit of x^{n/2} J_nu(x)
            bess = std::pow(x, n - 1.0) * std::pow(2.0, -nu) / std::tgamma(nu + 1.0);
        } else {
            bess = std::pow(x, 0.5 * n) * bessel_j(nu, x);
        }
        return std::exp(-q * q * q * q) * bess;
    };
    // the Bessel series carries ~1e-12 relative cancellation noise and the
    // integrand amplitude grows like s^{n/2}; the tolerance must track both
    // or the adaptive rule subdivides forever
    const double tol = 1e-11 * (1.0 + std::pow(s, 0.5 * n));
    return pre * integrate(g, 0.0, 3.6, tol);
}

// The profile decays like exp(-0.2362 s^{4/3}) (saddle point of the Fourier
// integral), so a table to s = 20 still leaves ~1e-5 of weighted mass outside
// for n = 4; the default span of 40 pushes the truncation below 1e-12.
struct KernelTable {
    int n = 1;
    double S = 40.0;
    double ds = 1e-2;
    std::vector<double> f;      // f_n at s_i = i*ds
    std::vector<double> fp;     // interpolation slopes
    std::vector<double> F_int;  // int_0^s f
    double alpha_bar = 0.0;     // normalization of p_n
    double K_fit = 0.0;         // envelope |f| <= K exp(-mu s^{4/3})
    double mu_fit = 0.0;
    double abs_mass = 1.0;      // int |p_n(1,.)| over R^n

    double eval_f(double s) const {
        const double as = std::abs(s);
        if (as >= S) return 0.0;
        return hermite_eval(f, fp, 0.0, ds, as);
    }

    // p_n(t, x) = alpha_bar t^{-n/4} f_n(|x| / t^{1/4})
    double p(double t, double x) const {
        if (!(t > 0.0)) throw std::domain_error("kernel: t > 0");
        const double tq = std::pow(t, 0.25);
        return alpha_bar * std::pow(t, -0.25 * n) * eval_f(std::abs(x) / tq);
    }

    // int_z^inf p_n(t, x) dx for the 1-D kernel (constant-tail corrections)
    double upper_mass(double t, double z) const {
        const double tq = std::pow(t, 0.25);
        const double s = std::abs(z) / tq;
        const double half = s >= S ? 0.5 : alpha_bar * hermite_eval(F_int, f, 0.0, ds, s);
        return z >= 0.0 ? 0.5 - half : 0.5 + half;
    }

    // d/dx p_n(t, x), from the table slopes (linear interpolation suffices)
    double dp(double t, double x) const {
        const double tq = std::pow(t, 0.25);
        const double s = std::abs(x) / tq;
        if (s >= S - ds) return 0.0;
        const auto i = static_cast<std::size_t>(s / ds);
        const double w = s / ds - static_cast<double>(i);
        const double d = alpha_bar * std::pow(t, -0.25 * (n + 1)) *
                         ((1.0 - w) * fp[i] + w * fp[i + 1]);
        return x >= 0.0 ? d : -d;
    }
};

inline KernelTable build_kernel_table(int n, double S = 40.0, double ds = 1e-2) {
    KernelTable t;
    t.n = n;
    t.S = S;
    t.ds = ds;
    const auto m = static_cast<std::size_t>(std::llround(S / ds)) + 1;
    t.f.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        t.f[i] = kernel_profile(n, static_cast<double>(i) * ds);

    // interpolation slopes from the table itself (the analytic derivative
    // -s f_{n+2}(s) is reserved for the recurrence test)
    t.fp.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (i >= 2 && i + 2 < m)
            t.fp[i] = (t.f[i - 2] - 8.0 * t.f[i - 1] + 8.0 * t.f[i + 1] - t.f[i + 2]) /
                      (12.0 * ds);
        else if (i == 0)
            t.fp[i] = 0.0;  // f_n is even in s
        else if (i + 1 < m)
            t.fp[i] = (t.f[i + 1] - t.f[i - 1]) / (2.0 * ds);
        else
            t.fp[i] = (t.f[i] - t.f[i - 1]) / ds;
    }

    // normalization: alpha_bar |S^{n-1}| int_0^inf f s^{n-1} ds = 1
    std::vector<double> w(m), wa(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double s = static_cast<double>(i) * ds;
        const double sn = std::pow(s, n - 1.0);
        w[i] = t.f[i] * sn;
        wa[i] = std::abs(t.f[i]) * sn;
    }
    const double area = unit_sphere_area(n);
    t.alpha_bar = 1.0 / (area * simpson(w, ds));
    t.abs_mass = std::abs(t.alpha_bar) * area * simpson(wa, ds);

    t.F_int = prefix_integral(t.f, t.fp, ds, 0.0);

    // envelope fit through the local maxima of |f|
    std::vector<double> xs, ys;
    xs.push_back(0.0);
    ys.push_back(std::log(std::abs(t.f[0])));
    for (std::size_t i = 1; i + 1 < m; ++i) {
        const double a = std::abs(t.f[i]);
        if (a > std::abs(t.f[i - 1]) && a > std::abs(t.f[i + 1]) && a > 1e-12) {
            xs.push_back(std::pow(static_cast<double>(i) * ds, 4.0 / 3.0));
            ys.push_back(std::log(a));
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    const double nn = static_cast<double>(xs.size());
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    t.mu_fit = -slope;
    double logK = (sy - slope * sx) / nn;
    // lift K until the envelope holds at every node
    double K = std::exp(logK);
    for (std::size_t i = 0; i < m; ++i) {
        const double s = static_cast<double>(i) * ds;
        K = std::max(K, std::abs(t.f[i]) * std::exp(t.mu_fit * std::pow(s, 4.0 / 3.0)));
    }
    t.K_fit = K * (1.0 + 1e-12);
    if (!(t.mu_fit > 0.0)) throw NumericalError("kernel envelope: mu <= 0");
    return t;
}

// ---------------------------------------------------------------------------
// Sampled 1-D functions and kernel convolution.
// ---------------------------------------------------------------------------

enum class TailRule { Zero, Constant };

struct Sampled1D {
    double x0 = 0.0;
    double dx = 0.0;
    std::vector<double> u;
    TailRule tails = TailRule::Zero;

    double x_at(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
    std::size_t size() const { return u.size(); }
};

// Gamma_t[u]: direct-summation convolution with p_n(t, .), midpoint cells
// plus analytic tail masses for constant extension. Spectrally accurate for
// smooth decaying u once t >~ 32 (dx/pi)^4.
inline Sampled1D heat_convolve(const KernelTable& kt, const Sampled1D& u0, double t) {
    if (!(t > 0.0)) throw std::domain_error("heat_convolve: t > 0");
    if (kt.n != 1) throw std::invalid_argument("heat_convolve: 1-D path needs n = 1");
    const std::size_t nn = u0.size();
    Sampled1D out = u0;
    // kernel samples at offsets k*dx, |k| <= reach
    const double tq = std::pow(t, 0.25);
    const auto reach = std::min<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>(nn),
        static_cast<std::ptrdiff_t>(std::ceil(kt.S * tq / u0.dx)) + 1);
    std::vector<double> ker(reach + 1);
    for (std::ptrdiff_t k = 0; k <= reach; ++k) ker[k] = kt.p(t, u0.dx * k) * u0.dx;
    const double uL = u0.tails == TailRule::Constant ? u0.u.front() : 0.0;
    const double uR = u0.tails == TailRule::Constant ? u0.u.back() : 0.0;
    for (std::size_t i = 0; i < nn; ++i) {
        double acc = 0.0;
        const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(i) - reach);
        const auto hi = std::min<std::ptrdiff_t>(nn - 1, static_cast<std::ptrdiff_t>(i) + reach);
        for (std::ptrdiff_t j = lo; j <= hi; ++j)
            acc += ker[std::abs(static_cast<std::ptrdiff_t>(i) - j)] * u0.u[j];
        if (u0.tails == TailRule::Constant) {
            // kernel mass below the first cell edge / above the last, with
            // the Euler-Maclaurin boundary term that matches the midpoint
            // sum used inside: sum = int + dx^2/24 p'(z) + O(dx^4)
            const double em = u0.dx * u0.dx / 24.0;
            const double zl = (u0.x_at(i) - (u0.x0 - 0.5 * u0.dx));
            const double zr = (u0.x_at(nn - 1) + 0.5 * u0.dx) - u0.x_at(i);
            acc += uL * (kt.upper_mass(t, zl) + em * kt.dp(t, zl));
            acc += uR * (kt.upper_mass(t, zr) + em * kt.dp(t, zr));
        }
        out.u[i] = acc;
    }
    return out;
}

// Radial convolution (p_n(t, .) * u0)(r) in R^n, n >= 2, for radial u0 given
// as a callable; the angular integral is Gauss-Legendre in theta.
inline double heat_convolve_radial(const KernelTable& kt, int n,
                                   const std::function<double(double)>& u0, double t,
                                   double r) {
    if (!(t > 0.0)) throw std::domain_error("heat_convolve_radial: t > 0");
    if (kt.n != n || n < 2) throw std::invalid_argument("heat_convolve_radial: bad n");
    const double tq = std::pow(t, 0.25);
    const double smax = r + kt.S * tq;
    const int ntheta = 48;
    // Gauss-Legendre nodes on [0, pi]
    static const int half = 24;
    std::vector<double> th(ntheta), wth(ntheta);
    {
        // compose from gauss8 panels: 6 panels of 8 points
        static constexpr double gx[4] = {0.183434642495649804939476142360184,
                                         0.525532409916328985817739049189246,
                                         0.796666477413626739591553936475830,
                                         0.960289856497536231683560868569472};
        static constexpr double gw[4] = {0.362683783378361982965150449277196,
                                         0.313706645877887287337962201986601,
                                         0.222381034453374470544355994426241,
                                         0.101228536290376259152531354309962};
        int idx = 0;
        for (int p = 0; p < 6; ++p) {
            const double a = kPi * p / 6.0, b = kPi * (p + 1) / 6.0;
            const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
            for (int j = 0; j < 4; ++j) {
                th[idx] = c - hw * gx[j];
                wth[idx++] = gw[j] * hw;
                th[idx] = c + hw * gx[j];
                wth[idx++] = gw[j] * hw;
            }
        }
        (void)half;
    }
    const double area_sm2 = (n == 2) ? 2.0 : unit_sphere_area(n - 1);
    auto radial_int = [&](double s) {
        double acc = 0.0;
        for (int j = 0; j < ntheta; ++j) {
            const double d2 = r * r + s * s - 2.0 * r * s * std::cos(th[j]);
            const double d = std::sqrt(std::max(d2, 0.0));
            const double sinw = (n > 2) ? std::pow(std::sin(th[j]), n - 2.0) : 1.0;
            acc += wth[j] * sinw * kt.p(t, d);
        }
        return acc * u0(s) * std::pow(s, n - 1.0);
    };
    return area_sm2 * integrate(radial_int, 0.0, smax, 1e-9);
}

// ---------------------------------------------------------------------------
// The 1-D damped kernel Q and the Duhamel form.
// ---------------------------------------------------------------------------

// Q(nu, y) = (2 pi)^{-1} int_R exp(-nu (xi^4 + 2 a^2 xi^2)) e^{i xi y} d xi.
// Composite Gauss panels sized to the oscillation (phase <= 3 per panel);
// fixed rules behave better than adaptive bisection when the answer is many
// orders below the integrand amplitude.
inline double q_kernel(double alpha, double nu, double y) {
    if (!(nu > 0.0)) throw std::domain_error("q_kernel: nu > 0");
    const double ximax = std::pow(50.0 / nu, 0.25) + 1.0;
    auto g = [&](double xi) {
        const double xi2 = xi * xi;
        return std::exp(-nu * (xi2 * xi2 + 2.0 * alpha * alpha * xi2)) *
               std::cos(xi * y);
    };
    const double width = std::min(0.5, 3.0 / (1.0 + std::abs(y)));
    const int panels = std::max(8, static_cast<int>(std::ceil(ximax / width)));
    double acc = 0.0;
    for (int k = 0; k < panels; ++k)
        acc += gauss8(g, ximax * k / panels, ximax * (k + 1) / panels);
    return acc / kPi;
}

// u(nu, y) = int_0^{nu+T} int e^{-a^4 tau} Q(tau, x) f(nu - tau, y - x) dx dtau,
// the solution of u_nu = -u_yyyy + 2 a^2 u_yy - a^4 u + f with u(-T, .) = 0.
// The forcing is a callable; output is sampled on the given grid.
inline Sampled1D duhamel_1d(double alpha, const std::function<double(double, double)>& f,
                            double T, double nu_out, double x0, double dx, std::size_t nn,
                            int tau_panels = 64) {
    Sampled1D out;
    out.x0 = x0;
    out.dx = dx;
    out.u.assign(nn, 0.0);
    const double len = nu_out + T;
    if (len <= 0.0) return out;
    // composite Simpson in tau on [tau_min, len] plus the identity sliver.
    // Below tau ~ 30 (dx/2pi)^4 the kernel is narrower than the grid resolves
    // (aliasing), so that range is treated as the identity instead.
    const double tau_alias = 30.0 * std::pow(dx / (2.0 * kPi), 4.0);
    const double tau_min = std::min(std::max(1e-4, tau_alias), 0.5 * len);
    const int K = tau_panels + (tau_panels % 2);
    const double dtau = (len - tau_min) / K;
    const auto reach = static_cast<std::ptrdiff_t>(nn);
    std::vector<double> ker(2 * nn + 1), force(nn);
    for (int k = 0; k <= K; ++k) {
        const double tau = tau_min + k * dtau;
        double wk = (k == 0 || k == K) ? dtau / 3.0 : (k % 2 == 1 ? 4.0 : 2.0) * dtau / 3.0;
        wk *= std::exp(-std::pow(alpha, 4.0) * tau);
        // kernel row at this tau (grid offsets)
        for (std::ptrdiff_t j = -reach; j <= reach; ++j)
            ker[j + reach] = q_kernel(alpha, tau, dx * static_cast<double>(j)) * dx;
        for (std::size_t i = 0; i < nn; ++i)
            force[i] = f(nu_out - tau, x0 + dx * static_cast<double>(i));
        for (std::size_t i = 0; i < nn; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < nn; ++j)
                acc += ker[static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(j) +
                           reach] *
                       force[j];
            out.u[i] += wk * acc;
        }
    }
    // tau in [0, tau_min): Q acts as the identity up to O(tau)
    for (std::size_t i = 0; i < nn; ++i)
        out.u[i] += tau_min * f(nu_out, x0 + dx * static_cast<double>(i));
    return out;
}

// ---------------------------------------------------------------------------
// Mild solutions of u_t + (-Lap)^2 u = G[Lap u, u_x, u, t, x] by Picard
// iteration on contraction windows.
// ---------------------------------------------------------------------------

using SemilinearRhs = std::function<double(double lap, double grad, double u, double t,
                                           double x)>;

struct MildOptions {
    int panels_per_window = 96;
    double window_scale = 1.0;  // multiplies the contraction window 1/(2 sigma C_n)
    double tol = 1e-10;
    int max_iter = 60;
};

struct MildResult {
    Sampled1D u;
    int windows = 0;
    int iterations = 0;
};

inline MildResult mild_solve(const KernelTable& kt, const SemilinearRhs& G, double sigma,
                             const Sampled1D& u0, double t0, double t1,
                             const MildOptions& opt = {}) {
    if (kt.n != 1) throw std::invalid_argument("mild_solve: 1-D kernel required");
    MildResult res;
    res.u = u0;
    if (!(t1 > t0)) return res;
    // contraction window per the fixed-point argument; the kernel is
    // sign-changing, so its absolute mass (not 1) sets the constant
    const double Twin = (sigma > 0.0)
                            ? opt.window_scale / (2.0 * sigma * kt.abs_mass)
                            : (t1 - t0);
    const std::size_t nn = u0.size();
    const double dx = u0.dx, x0 = u0.x0;

    auto lap_of = [&](const std::vector<double>& v, std::size_t i) {
        // 5-point second difference, one-sided at the edges
        if (i >= 2 && i + 2 < nn)
            return (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] -
                    v[i + 2]) /
                   (12.0 * dx * dx);
        const std::size_t j = std::min(std::max<std::size_t>(i, 2), nn - 3);
        return (v[j - 1] - 2.0 * v[j] + v[j + 1]) / (dx * dx);
    };
    auto grad_of = [&](const std::vector<double>& v, std::size_t i) {
        if (i >= 1 && i + 1 < nn) return (v[i + 1] - v[i - 1]) / (2.0 * dx);
        return i == 0 ? (v[1] - v[0]) / dx : (v[nn - 1] - v[nn - 2]) / dx;
    };

    double a = t0;
    while (a < t1 - 1e-15) {
        const double b = std::min(t1, a + Twin);
        const int K = opt.panels_per_window;
        const double dtau = (b - a) / K;
        // u at every tau node, initialized by the free evolution
        std::vector<Sampled1D> u(K + 1, res.u);
        for (int k = 1; k <= K; ++k) u[k] = heat_convolve(kt, res.u, k * dtau);
        std::vector<Sampled1D> gfield(K + 1, res.u);

        double diff = 0.0;
        int it = 0;
        double prev_diff = 1e300;
        for (; it < opt.max_iter; ++it) {
            for (int k = 0; k <= K; ++k)
                for (std::size_t i = 0; i < nn; ++i)
                    gfield[k].u[i] = G(lap_of(u[k].u, i), grad_of(u[k].u, i), u[k].u[i],
                                       a + k * dtau, x0 + dx * static_cast<double>(i));
            diff = 0.0;
            for (int k = 1; k <= K; ++k) {
                // quadrature weights on [a, tau_k]
                std::vector<double> wq(k + 1, 0.0);
                if (k == 1) {
                    wq[0] = wq[1] = 0.5 * dtau;
                } else if (k % 2 == 0) {
                    for (int j = 0; j <= k; ++j)
                        wq[j] = (j == 0 || j == k) ? dtau / 3.0
                                                   : (j % 2 ? 4.0 : 2.0) * dtau / 3.0;
                } else {
                    // Simpson up to k-3, then the 3/8 rule on the last three panels
                    if (k == 3) {
                        wq[0] = wq[3] = 3.0 * dtau / 8.0;
                        wq[1] = wq[2] = 9.0 * dtau / 8.0;
                    } else {
                        for (int j = 0; j <= k - 3; ++j)
                            wq[j] = (j == 0 || j == k - 3)
                                        ? dtau / 3.0
                                        : (j % 2 ? 4.0 : 2.0) * dtau / 3.0;
                        wq[k - 3] += 3.0 * dtau / 8.0;
                        wq[k - 2] += 9.0 * dtau / 8.0;
                        wq[k - 1] += 9.0 * dtau / 8.0;
                        wq[k] += 3.0 * dtau / 8.0;
                    }
                }
                Sampled1D acc = heat_convolve(kt, res.u, k * dtau);
                for (int j = 0; j <= k; ++j) {
                    if (wq[j] == 0.0) continue;
                    Sampled1D term = (j == k) ? gfield[j]
                                              : heat_convolve(kt, gfield[j], (k - j) * dtau);
                    for (std::size_t i = 0; i < nn; ++i) acc.u[i] += wq[j] * term.u[i];
                }
                for (std::size_t i = 0; i < nn; ++i)
                    diff = std::max(diff, std::abs(acc.u[i] - u[k].u[i]));
                u[k] = std::move(acc);
            }
            ++res.iterations;
            if (diff < opt.tol) break;
            if (diff > 10.0 * prev_diff + 1.0)
                throw LipschitzError("mild_solve: Picard iterates are growing");
            prev_diff = diff;
        }
        res.u = u[K];
        ++res.windows;
        a = b;
    }
    return res;
}

}  // namespace wch

#endif
