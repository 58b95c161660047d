#ifndef WCH_NUMERICS_HPP
#define WCH_NUMERICS_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "wch/errors.hpp"

namespace wch {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

inline double sq(double x) { return x * x; }
inline double cube(double x) { return x * x * x; }

// Surface area of the unit sphere S^{n-1} in R^n.
inline double unit_sphere_area(int n) {
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod 7-15 quadrature.
// ---------------------------------------------------------------------------

namespace detail {

// QUADPACK 15-point Kronrod nodes/weights with embedded 7-point Gauss rule.
inline constexpr double kGK_x[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kGK_wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGK_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double& val, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double resk = kGK_wk[7] * fc;
    double resg = kGK_wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * kGK_x[j];
        const double f1 = f(c - x), f2 = f(c + x);
        resk += kGK_wk[j] * (f1 + f2);
        if (j % 2 == 1) resg += kGK_wg[j / 2] * (f1 + f2);
    }
    val = resk * h;
    err = std::abs((resk - resg) * h);
}

template <class F>
inline double gk_adapt(const F& f, double a, double b, double tol, int depth,
                       long& budget) {
    double val, err;
    gk15(f, a, b, val, err);
    if (err <= tol || depth >= 40) {
        if (depth >= 40 && !(err <= 1e4 * tol))
            throw NumericalError("adaptive quadrature failed to converge");
        return val;
    }
    if (--budget < 0)
        throw NumericalError("adaptive quadrature exceeded its subdivision budget");
    const double c = 0.5 * (a + b);
    return gk_adapt(f, a, c, 0.5 * tol, depth + 1, budget) +
           gk_adapt(f, c, b, 0.5 * tol, depth + 1, budget);
}

}  // namespace detail

// Integrate f over [a,b] to absolute tolerance abs_tol.
template <class F>
inline double integrate(const F& f, double a, double b, double abs_tol = 1e-12) {
    if (a == b) return 0.0;
    long budget = 200000;
    return detail::gk_adapt(f, a, b, abs_tol, 0, budget);
}

// Fixed-order Gauss-Legendre on [a,b] (8 points); exact through degree 15.
template <class F>
inline double gauss8(const F& f, double a, double b) {
    static constexpr double x[4] = {0.183434642495649804939476142360184,
                                    0.525532409916328985817739049189246,
                                    0.796666477413626739591553936475830,
                                    0.960289856497536231683560868569472};
    static constexpr double w[4] = {0.362683783378361982965150449277196,
                                    0.313706645877887287337962201986601,
                                    0.222381034453374470544355994426241,
                                    0.101228536290376259152531354309962};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int j = 0; j < 4; ++j)
        s += w[j] * (f(c - h * x[j]) + f(c + h * x[j]));
    return s * h;
}

// ---------------------------------------------------------------------------
// Composite rules on uniform grids.
// ---------------------------------------------------------------------------

// Composite Simpson over samples f[0..m-1] with spacing h.
// Falls back to a trapezoid panel at the end when the count is even.
inline double simpson(const std::vector<double>& f, double h) {
    const std::size_t m = f.size();
    if (m < 2) return 0.0;
    double s = 0.0;
    std::size_t i = 0;
    for (; i + 2 < m; i += 2) s += f[i] + 4.0 * f[i + 1] + f[i + 2];
    s *= h / 3.0;
    if (i + 1 < m) s += 0.5 * h * (f[i] + f[i + 1]);
    return s;
}

// Cumulative integral of a sampled function with known derivative samples.
// Per-interval rule: h/2 (f_i + f_{i+1}) + h^2/12 (f'_i - f'_{i+1}),
// which is the Euler-Maclaurin corrected trapezoid, O(h^5 f'''') locally.
inline std::vector<double> prefix_integral(const std::vector<double>& f,
                                           const std::vector<double>& fp,
                                           double h, double i0 = 0.0) {
    std::vector<double> out(f.size());
    if (f.empty()) return out;
    out[0] = i0;
    const double c12 = h * h / 12.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        out[i + 1] = out[i] + 0.5 * h * (f[i] + f[i + 1]) + c12 * (fp[i] - fp[i + 1]);
    return out;
}

// ---------------------------------------------------------------------------
// Cubic Hermite interpolation on a uniform grid.
// ---------------------------------------------------------------------------

// Value at x of the cubic matching (v,d) at the two nodes bracketing x.
// Grid node i sits at x0 + i*h.
inline double hermite_eval(const std::vector<double>& v, const std::vector<double>& d,
                           double x0, double h, double x) {
    const std::size_t m = v.size();
    double u = (x - x0) / h;
    auto i = static_cast<std::ptrdiff_t>(std::floor(u));
    if (i < 0) i = 0;
    if (i > static_cast<std::ptrdiff_t>(m) - 2) i = static_cast<std::ptrdiff_t>(m) - 2;
    const double s = u - static_cast<double>(i);
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * v[i] + h01 * v[i + 1] + h * (h10 * d[i] + h11 * d[i + 1]);
}

// ---------------------------------------------------------------------------
// Root finding: guarded Newton with bisection fallback.
// ---------------------------------------------------------------------------

// Solve F(x)=0 for x in [lo,hi], F increasing. dF may underestimate near the
// ends; every Newton step is clipped back into the current bracket.
template <class F, class DF>
inline double bisect_newton(const F& f, const DF& df, double lo, double hi,
                            double x0, double ftol, int max_iter = 60) {
    double x = std::min(std::max(x0, lo), hi);
    double flo = 0.0, fhi = 0.0;  // signs only, filled lazily
    bool have_bracket = false;
    for (int it = 0; it < max_iter; ++it) {
        const double fx = f(x);
        if (std::abs(fx) < ftol) return x;
        if (fx > 0)
            hi = x, fhi = fx;
        else
            lo = x, flo = fx;
        have_bracket = have_bracket || (flo < 0 && fhi > 0);
        const double d = df(x);
        double xn = (d > 0) ? x - fx / d : std::numeric_limits<double>::quiet_NaN();
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
    }
    throw NumericalError("bisect_newton: no convergence");
}

// ---------------------------------------------------------------------------
// Pentadiagonal LU (no pivoting) for strictly banded systems.
// ---------------------------------------------------------------------------

// Bands are indexed by row: c2[i] multiplies x[i-2], c1[i] x[i-1],
// e1[i] x[i+1], e2[i] x[i+2]. Out-of-range entries are ignored.
class PentaLU {
public:
    PentaLU() = default;
    PentaLU(const std::vector<double>& c2, const std::vector<double>& c1,
            const std::vector<double>& d, const std::vector<double>& e1,
            const std::vector<double>& e2) {
        factor(c2, c1, d, e1, e2);
    }

    void factor(const std::vector<double>& c2, const std::vector<double>& c1,
                const std::vector<double>& d, const std::vector<double>& e1,
                const std::vector<double>& e2) {
        n_ = d.size();
        l1_.assign(n_, 0.0);
        l2_.assign(n_, 0.0);
        du_.assign(n_, 0.0);
        u1_.assign(n_, 0.0);
        u2_.assign(n_, 0.0);
        rd_.assign(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            double l2 = 0.0, l1 = 0.0;
            if (i >= 2) l2 = c2[i] / du_[i - 2];
            if (i >= 1) l1 = (c1[i] - (i >= 2 ? l2 * u1_[i - 2] : 0.0)) / du_[i - 1];
            double dd = d[i];
            if (i >= 2) dd -= l2 * u2_[i - 2];
            if (i >= 1) dd -= l1 * u1_[i - 1];
            if (dd == 0.0) throw NumericalError("PentaLU: zero pivot");
            l2_[i] = l2;
            l1_[i] = l1;
            du_[i] = dd;
            rd_[i] = 1.0 / dd;
            u1_[i] = (i + 1 < n_ ? e1[i] : 0.0) - (i >= 1 ? l1 * u2_[i - 1] : 0.0);
            u2_[i] = (i + 2 < n_) ? e2[i] : 0.0;
        }
        // pair-step coefficients (see solve)
        fl1_.assign(n_, 0.0);
        fq1_.assign(n_, 0.0);
        fq2_.assign(n_, 0.0);
        bry_.assign(n_, 0.0);
        bq1_.assign(n_, 0.0);
        bq2_.assign(n_, 0.0);
        for (std::size_t i = 1; i < n_; ++i) {
            fl1_[i] = l1_[i];
            fq1_[i] = l1_[i] * l1_[i - 1] - l2_[i];
            fq2_[i] = l1_[i] * l2_[i - 1];
        }
        for (std::size_t j = 0; j + 1 < n_; ++j) {
            const double t = rd_[j] * u1_[j] * rd_[j + 1];
            bry_[j] = t;
            bq1_[j] = t * u1_[j + 1] - rd_[j] * u2_[j];
            bq2_[j] = t * u2_[j + 1];
        }
    }

    // Substitution passes are two-term linear recurrences; processing rows in
    // pairs with the second row's coefficients pre-substituted halves the
    // dependency-chain latency (two fused chains run in parallel).
    void solve(const double* b, double* x) const {
        const std::size_t n = n_;
        x[0] = b[0];
        if (n > 1) x[1] = std::fma(-l1_[1], x[0], b[1]);
        std::size_t i = 2;
        for (; i + 1 < n; i += 2) {
            const double ym1 = x[i - 1], ym2 = x[i - 2];
            const double bi = std::fma(-l2_[i], ym2, b[i]);
            const double yi = std::fma(-l1_[i], ym1, bi);
            const double bj = std::fma(-fl1_[i + 1], b[i], b[i + 1]);
            const double tj = std::fma(fq1_[i + 1], ym1, bj);
            x[i] = yi;
            x[i + 1] = std::fma(fq2_[i + 1], ym2, tj);
        }
        for (; i < n; ++i)
            x[i] = std::fma(-l2_[i], x[i - 2], std::fma(-l1_[i], x[i - 1], b[i]));
        // backward: U x = y
        x[n - 1] *= rd_[n - 1];
        if (n > 1)
            x[n - 2] = std::fma(-u1_[n - 2], x[n - 1], x[n - 2]) * rd_[n - 2];
        std::ptrdiff_t k = static_cast<std::ptrdiff_t>(n) - 3;
        for (; k >= 1; k -= 2) {
            const double xp1 = x[k + 1], xp2 = x[k + 2];
            const double yk = std::fma(-u2_[k], xp2, x[k]);
            const double xk = std::fma(-u1_[k], xp1, yk) * rd_[k];
            const double yj = std::fma(-bry_[k - 1], x[k], x[k - 1] * rd_[k - 1]);
            x[k] = xk;
            x[k - 1] = std::fma(bq1_[k - 1], xp1, std::fma(bq2_[k - 1], xp2, yj));
        }
        if (k == 0)
            x[0] = std::fma(-u2_[0], x[2], std::fma(-u1_[0], x[1], x[0])) * rd_[0];
    }

    void solve(const std::vector<double>& b, std::vector<double>& x) const {
        x.resize(n_);
        solve(b.data(), x.data());
    }

    std::size_t size() const { return n_; }

private:
    std::size_t n_ = 0;
    std::vector<double> l1_, l2_, du_, u1_, u2_, rd_;
    std::vector<double> fl1_, fq1_, fq2_, bry_, bq1_, bq2_;
};

// Symmetric tridiagonal solve with partial-pivoting-free Thomas algorithm is
// not safe for indefinite matrices; this variant keeps a one-element lookahead
// pivot and is adequate for the shifted operators used here.
class TriLU {
public:
    TriLU(const std::vector<double>& sub, const std::vector<double>& diag,
          const std::vector<double>& sup)
        : a_(sub), b_(diag), c_(sup) {}

    // Gaussian elimination with partial pivoting on the tridiagonal system.
    std::vector<double> solve(std::vector<double> r) const {
        const std::size_t n = b_.size();
        std::vector<double> a(a_), b(b_), c(c_), d(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(a[i + 1]) > std::abs(b[i])) {
                std::swap(b[i], a[i + 1]);
                std::swap(c[i], b[i + 1]);
                std::swap(d[i], c[i + 1]);
                std::swap(r[i], r[i + 1]);
            }
            if (b[i] == 0.0) throw NumericalError("TriLU: singular");
            const double m = a[i + 1] / b[i];
            b[i + 1] -= m * c[i];
            c[i + 1] -= m * d[i];
            r[i + 1] -= m * r[i];
        }
        std::vector<double> x(n);
        for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n) - 1; i >= 0; --i) {
            double s = r[i];
            if (i + 1 < static_cast<std::ptrdiff_t>(n)) s -= c[i] * x[i + 1];
            if (i + 2 < static_cast<std::ptrdiff_t>(n)) s -= d[i] * x[i + 2];
            if (b[i] == 0.0) throw NumericalError("TriLU: singular");
            x[i] = s / b[i];
        }
        return x;
    }

private:
    std::vector<double> a_, b_, c_;
};

// ---------------------------------------------------------------------------
// Finite-difference weights (Fornberg).
// ---------------------------------------------------------------------------

// Weights for the m-th derivative at z from samples at nodes x[0..nn-1].
inline std::vector<double> fd_weights(double z, const std::vector<double>& x, int m) {
    const int nn = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(nn, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = x[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i < nn; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nn);
    for (int i = 0; i < nn; ++i) w[i] = c[i][m];
    return w;
}

}  // namespace wch

#endif
