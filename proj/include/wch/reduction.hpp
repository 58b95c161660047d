#ifndef WCH_REDUCTION_HPP
#define WCH_REDUCTION_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "wch/ansatz.hpp"
#include "wch/errors.hpp"
#include "wch/numerics.hpp"

namespace wch {

// ---------------------------------------------------------------------------
// Kernel projections and the Lagrange multiplier c(t).
// ---------------------------------------------------------------------------

// int_0^inf phi(r) omega'(r - rho(t)) r^{n-1} dr by composite Simpson.
inline double project_kernel(const RadialField& phi, const LayerTable& layer,
                             const ModulationState& mod, double t) {
    const double rho = mod.rho(t);
    std::vector<double> f(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double r = phi.grid.r(i);
        f[i] = phi[i] * layer.eval(r - rho, 1) * std::pow(r, mod.n - 1.0);
    }
    return simpson(f, phi.grid.dx);
}

// m0 = int (omega')^2 dy and m2 = int (omega')^2 y^2 dy over the table.
inline double layer_mass(const LayerTable& layer, int moment = 0) {
    std::vector<double> f(layer.size());
    for (std::size_t i = 0; i < layer.size(); ++i)
        f[i] = sq(layer.om1[i]) * std::pow(layer.y_at(i), static_cast<double>(moment));
    return simpson(f, layer.step);
}

// Denominator of the multiplier relation:
// int d_r omega_hat(t,r) omega'(r - rho) r^{n-1} dr, with
// d_r omega_hat = omega' chi + (omega + 1) chi'.
inline double projection_denominator(const Ansatz& anz, double t, const RadialGrid& grid) {
    const double rho = anz.mod.rho(t);
    std::vector<double> f(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double r = grid.r(i);
        const double y = r - rho;
        const double doh = anz.layer->eval(y, 1) * anz.cutoff.value(r) +
                           (anz.layer->eval(y, 0) + 1.0) * anz.cutoff.deriv(r);
        f[i] = doh * anz.layer->eval(y, 1) * std::pow(r, anz.n() - 1.0);
    }
    return simpson(f, grid.dx);
}

// The multiplier c(t) that restores the orthogonality constraint: every
// integral of the displayed relation (integration-by-parts form), divided by
// the d_r omega_hat projection. phi enters through value and two derivatives,
// g is the forcing (E + N(phi) in the full problem).
inline double compute_c(const RadialField& phi, const RadialField& g, const Ansatz& anz,
                        double t) {
    const RadialGrid& grid = phi.grid;
    const int n = anz.n();
    const double m = n - 1;
    const double rho = anz.mod.rho(t), rhop = anz.mod.rhop(t);
    const Potential& pot = *anz.pot;
    Stencils st(grid.dx);
    const RadialField z = anz.z_field(t, grid);

    std::vector<double> f(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double r = grid.r(i);
        const double y = r - rho;
        const double rn = std::pow(r, m);
        const double o1 = anz.layer->eval(y, 1), o2 = anz.layer->eval(y, 2),
                     o3 = anz.layer->eval(y, 3);
        const double w2z = pot.eval(z[i], 2);
        const double p0 = phi[i];
        const double p1 = st.deriv(phi.v, i, 1);
        const double p2 = st.deriv(phi.v, i, 2);
        // first display block
        const double lhs1 = (o3 + m / r * o2 - w2z * o1) * (-p2 - m / r * p1 + w2z * p0);
        // second block: [Lap z - W'(z)] phi omega'
        const double z1 = st.deriv(z.v, i, 1), z2 = st.deriv(z.v, i, 2);
        const double lhs2 = (z2 + m / r * z1 - pot.eval(z[i], 1)) * p0 * o1;
        // time-derivative block: phi d_t[omega'(r-rho)] = -rho' phi omega''
        const double lhs3 = -rhop * p0 * o2;
        // forcing block
        const double lhs4 = g[i] * o1;
        f[i] = (lhs1 + lhs2 + lhs3 + lhs4) * rn;
    }
    const double num = simpson(f, grid.dx);
    const double den = projection_denominator(anz, t, grid);
    if (std::abs(den) < 1e-8 * std::pow(rho, m))
        throw ThresholdError("compute_c: projection denominator too small");
    return num / den;
}

// ---------------------------------------------------------------------------
// Projected error decomposition.
// ---------------------------------------------------------------------------

struct ProjectionReport {
    double t = 0.0;
    double inner = 0.0;  // (0, delta0) part of the E projection
    double e1 = 0.0, e2 = 0.0, e3 = 0.0, e4 = 0.0, e5 = 0.0;
    double direct = 0.0;            // int E omega' r^{n-1} dr, direct route
    double denominator = 0.0;       // d_r omega_hat projection
    double leading_residual = 0.0;  // e1 - (rho' + A/rho^3) rho^{n-1} m0
    double m0 = 0.0;

    double total() const { return inner + e1 + e2 + e3 + e4 + e5; }
};

// Projections of the five-term outer decomposition of E plus the inner-region
// integral. Everything on r > delta0 is evaluated through the analytic
// derivative chain (layer/correction tables), keeping the split free of
// stencil truncation; the exponentially small inner part uses the stencils.
inline ProjectionReport projected_error_split(const Ansatz& anz, double t,
                                              double dx = 0.01) {
    const int n = anz.n();
    const double m = n - 1;
    const double a = anz.c2();
    const double rho = anz.mod.rho(t), rhop = anz.mod.rhop(t);
    const double d0 = anz.cutoff.delta0();
    const Potential& pot = *anz.pot;
    const RadialGrid grid(dx, rho + 30.0 + 2.0 * dx);

    ProjectionReport rep;
    rep.t = t;
    rep.m0 = layer_mass(*anz.layer, 0);

    // inner region via the stencil error field
    {
        const RadialField e = anz.error_field(t, grid);
        std::vector<double> f;
        f.reserve(grid.n);
        for (std::size_t i = 0; i < grid.n && grid.r(i) <= d0; ++i) {
            const double r = grid.r(i);
            f.push_back(e[i] * anz.layer->eval(r - rho, 1) * std::pow(r, m));
        }
        rep.inner = simpson(f, dx);
    }

    // outer region, five terms, analytic derivatives
    std::vector<double> f1, f2, f3, f4, f5, fd;
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double r = grid.r(i);
        if (r <= d0) continue;
        const double y = r - rho;
        const double rn = std::pow(r, m);
        const double o0 = anz.layer->eval(y, 0), o1 = anz.layer->eval(y, 1),
                     o2 = anz.layer->eval(y, 2), o3 = anz.layer->eval(y, 3),
                     o4 = anz.layer->eval(y, 4);
        const double q0 = anz.corr->eval(y, 0), q1 = anz.corr->eval(y, 1),
                     q2 = anz.corr->eval(y, 2), q3 = anz.corr->eval(y, 3),
                     q4 = anz.corr->eval(y, 4);
        const double w = o1 * rn;  // projection weight omega' r^{n-1}

        // E1-tilde: omega' (rho' + (n-3)(n-1)^2 / (2 r^3))
        const double e1 = o1 * (rhop + 0.5 * (n - 3) * m * m / cube(r));

        // E2-tilde and E3-tilde vanish identically off the collar; evaluate
        // them anyway as written
        const double e2v = -(/* d_rr */ o4 - (pot.eval(o0, 2) * o2 +
                                              pot.eval(o0, 3) * o1 * o1)) +
                           pot.eval(o0, 2) * (o2 - pot.eval(o0, 1));
        const double e3v = 2.0 * m / r *
                           (pot.eval(o0, 2) - pot.eval(o0, 2)) * o1;

        // ztilde derivatives by Leibniz
        const double r2 = 1.0 / (r * r), r3 = r2 / r, r4 = r3 / r, r5 = r4 / r,
                     r6 = r5 / r;
        const double zt0 = a * r2 * q0;
        const double zt1 = a * (r2 * q1 - 2.0 * r3 * q0);
        const double zt2 = a * (r2 * q2 - 4.0 * r3 * q1 + 6.0 * r4 * q0);
        const double zt3 = a * (r2 * q3 - 6.0 * r3 * q2 + 18.0 * r4 * q1 - 24.0 * r5 * q0);
        const double zt4 = a * (r2 * q4 - 8.0 * r3 * q3 + 36.0 * r4 * q2 -
                                96.0 * r5 * q1 + 120.0 * r6 * q0);

        // E4-tilde = F'(omega_hat)[ztilde] - (a/r^2)((n-3)/(2r) omega' + omega'')
        const double fprime =
            Fprime_pointwise(pot, n, r, o0, o1, o2, zt0, zt1, zt2, zt3, zt4);
        const double e4 = fprime - a * r2 * (0.5 * (n - 3) / r * o1 + o2);

        // E5-tilde = [F(z) - F(omega_hat) - F'(omega_hat)[ztilde]] - dt ztilde
        const double fz = F_pointwise(pot, n, r, o0 + zt0, o1 + zt1, o2 + zt2,
                                      o3 + zt3, o4 + zt4);
        const double foh = F_pointwise(pot, n, r, o0, o1, o2, o3, o4);
        const double e5 = (fz - foh - fprime) - (-rhop * a * r2 * q1);

        // direct route: E = F(z) - dt z
        const double direct = fz - (-rhop * (o1 + a * r2 * q1));

        f1.push_back(e1 * w);
        f2.push_back(e2v * w);
        f3.push_back(e3v * w);
        f4.push_back(e4 * w);
        f5.push_back(e5 * w);
        fd.push_back(direct * w);
    }
    rep.e1 = simpson(f1, dx);
    rep.e2 = simpson(f2, dx);
    rep.e3 = simpson(f3, dx);
    rep.e4 = simpson(f4, dx);
    rep.e5 = simpson(f5, dx);
    rep.direct = rep.inner + simpson(fd, dx);

    const double A = 0.5 * (n - 3) * m * m;
    rep.leading_residual =
        rep.e1 - (rhop + A / cube(rho)) * std::pow(rho, m) * rep.m0;
    rep.denominator = projection_denominator(anz, t, grid);
    return rep;
}

// ---------------------------------------------------------------------------
// Spectral gap of the layer operator.
// ---------------------------------------------------------------------------

struct SpectralGapResult {
    double eigenvalue = 0.0;   // min of ||B phi||^2 / ||phi||^2 on {omega'}^perp
    double residual = 0.0;     // ||A x - lambda x|| of the converged iterate
    int iterations = 0;
    double grid_h = 0.0;
    double Y = 0.0;
};

// Discretizes B = -d_yy + W''(omega) with Dirichlet ends, forms A = B^2 and
// runs inverse iteration on the orthogonal complement of the translation
// mode. The deflation direction is the discrete near-kernel eigenvector of B
// (inverse iteration itself), not the sampled omega': B^{-2} amplifies the
// kernel direction by ~1/lambda_0^2, so even an O(h^2) mismatch between the
// sampled profile and the discrete mode would dominate the iteration.
inline SpectralGapResult spectral_gap(const Potential& pot, const LayerTable& layer,
                                      double Y = 20.0, double h = 0.05) {
    if (Y < 20.0) throw std::invalid_argument("spectral_gap: Y >= 20");
    const auto nn = static_cast<std::size_t>(std::llround(2.0 * Y / h)) - 1;
    std::vector<double> sub(nn, -1.0 / (h * h)), diag(nn), sup(nn, -1.0 / (h * h));
    std::vector<double> vs(nn);  // sampled omega', the continuum kernel mode
    for (std::size_t i = 0; i < nn; ++i) {
        const double y = -Y + h * static_cast<double>(i + 1);
        diag[i] = 2.0 / (h * h) + pot.eval(layer.eval(y, 0), 2);
        vs[i] = layer.eval(y, 1);
    }
    const TriLU lu(sub, diag, sup);
    auto bmul = [&](const std::vector<double>& x) {
        std::vector<double> y(nn);
        for (std::size_t i = 0; i < nn; ++i) {
            double acc = diag[i] * x[i];
            if (i > 0) acc += sub[i] * x[i - 1];
            if (i + 1 < nn) acc += sup[i] * x[i + 1];
            y[i] = acc;
        }
        return y;
    };
    auto normalize = [&](std::vector<double>& x) {
        double nx = 0.0;
        for (double q : x) nx += q * q;
        nx = std::sqrt(nx);
        if (!(nx > 0.0)) throw NumericalError("spectral_gap: iteration collapsed");
        for (double& q : x) q /= nx;
    };

    // phase 1: the discrete translation mode (plain inverse iteration on B)
    std::vector<double> v0 = vs;
    normalize(v0);
    for (int it = 0; it < 30; ++it) {
        v0 = lu.solve(v0);
        normalize(v0);
    }
    auto deflate = [&](std::vector<double>& x) {
        double d = 0.0;
        for (std::size_t i = 0; i < nn; ++i) d += x[i] * v0[i];
        for (std::size_t i = 0; i < nn; ++i) x[i] -= d * v0[i];
    };

    SpectralGapResult res;
    res.grid_h = h;
    res.Y = Y;
    // phase 2: smallest eigenvalue of B^2 on the complement
    std::vector<double> x(nn);
    for (std::size_t i = 0; i < nn; ++i)
        x[i] = std::sin(kPi * (i + 1) / (nn + 1.0)) + 0.3 * std::sin(7.0 * i + 0.4);
    deflate(x);
    normalize(x);
    double lambda = 0.0, lambda_prev = 1e300;
    for (int it = 0; it < 400; ++it) {
        std::vector<double> y = lu.solve(lu.solve(x));
        deflate(y);
        normalize(y);
        const std::vector<double> by = bmul(y);
        double r = 0.0;
        for (double q : by) r += q * q;
        lambda = r;
        x = std::move(y);
        res.iterations = it + 1;
        if (std::abs(lambda - lambda_prev) < 1e-13 * std::abs(lambda) && it > 8) break;
        lambda_prev = lambda;
    }
    std::vector<double> ax = bmul(bmul(x));
    double rs = 0.0;
    for (std::size_t i = 0; i < nn; ++i) rs += sq(ax[i] - lambda * x[i]);
    res.residual = std::sqrt(rs);
    res.eigenvalue = lambda;
    if (!(lambda > 0.0)) throw NumericalError("spectral_gap: eigenvalue not positive");
    return res;
}

// ---------------------------------------------------------------------------
// The reduced modulation equation and its integral fixed point.
// ---------------------------------------------------------------------------

// P(h, h') at one time: the projected error with phi = 0, recombined as
//   P = -[int E omega' r^{n-1} dr] / (rho^{n-1} m0) + [rho' + A / rho^3].
inline double reduced_P(const Ansatz& anz, double t, double m0, double dx = 0.01) {
    const ProjectionReport rep = projected_error_split(anz, t, dx);
    const int n = anz.n();
    const double A = 0.5 * (n - 3) * sq(static_cast<double>(n - 1));
    const double rho = anz.mod.rho(t);
    return -rep.total() / (std::pow(rho, n - 1.0) * m0) +
           (anz.mod.rhop(t) + A / cube(rho));
}

// P-tilde adds the cubic remainder of expanding 1/rho^3 about gamma_n.
inline double reduced_Ptilde(const Ansatz& anz, double t, double m0, double dx = 0.01) {
    const int n = anz.n();
    const double A = 0.5 * (n - 3) * sq(static_cast<double>(n - 1));
    const double g = gamma_n(n, t);
    const double hh = anz.mod.h(t);
    return reduced_P(anz, t, m0, dx) +
           A * (1.0 / cube(g) - 1.0 / cube(g + hh) - 3.0 * hh / (g * g * g * g));
}

struct ReducedSolution {
    int n = 4;
    double p = 5.0;
    double That0 = 1e3;
    std::vector<double> sigma;  // log|t| grid, increasing
    std::vector<double> h, hp;  // samples and analytic derivative
    std::vector<double> P, Pt;  // final right-hand sides
    int iterations = 0;
    double p0_norm = 0.0;       // Lambda norm of the first iterate P(0)
    double final_diff = 0.0;
    double sup_h_logt = 0.0;

    double t_of(std::size_t j) const {
        return (n == 2 ? 1.0 : -1.0) * std::exp(sigma[j]);
    }

    // cubic Hermite in sigma = log|t| for h (slope dh/dsigma = h' t),
    // piecewise-linear for h'
    double h_at(double t) const {
        std::vector<double> d(h.size());
        for (std::size_t j = 0; j < h.size(); ++j) d[j] = hp[j] * t_of(j);
        return hermite_eval(h, d, sigma.front(), sigma[1] - sigma[0],
                            std::log(std::abs(t)));
    }
    double hp_at(double t) const {
        const double s = std::log(std::abs(t));
        const double ds = sigma[1] - sigma[0];
        const double u = (s - sigma.front()) / ds;
        auto j = static_cast<std::ptrdiff_t>(std::floor(u));
        if (j < 0) j = 0;
        if (j > static_cast<std::ptrdiff_t>(hp.size()) - 2)
            j = static_cast<std::ptrdiff_t>(hp.size()) - 2;
        const double w = u - static_cast<double>(j);
        return (1.0 - w) * hp[j] + w * hp[j + 1];
    }
};

// Solve h' + 3h/(4t) = P-tilde(h, h') by Picard iteration on the integral
// form h = -(-t)^{-3/4} int_t^{-T0} (-s)^{3/4} P-tilde ds (mirrored for
// n = 2). h and h' live on a log-spaced grid reaching 10^3 T0.
inline ReducedSolution solve_reduced_ode(const Potential& pot, const LayerTable& layer,
                                         const CorrectionTable& corr, const CutOff& cutoff,
                                         int n, double p, double That0, double tol,
                                         double dx = 0.01, int max_iter = 40,
                                         double span = 1e3) {
    if (!(n == 2 || n >= 4))
        throw std::invalid_argument("solve_reduced_ode: n = 2 or n >= 4");
    if (!(p > n && p <= n + 1))
        throw std::invalid_argument("solve_reduced_ode: p must lie in (n, n+1]");
    const double sgn = (n == 2) ? 1.0 : -1.0;

    ReducedSolution sol;
    sol.n = n;
    sol.p = p;
    sol.That0 = That0;
    const std::size_t M = 241;
    const double s0 = std::log(That0), s1 = std::log(That0 * span);
    sol.sigma.resize(M);
    for (std::size_t j = 0; j < M; ++j)
        sol.sigma[j] = s0 + (s1 - s0) * static_cast<double>(j) / (M - 1);
    sol.h.assign(M, 0.0);
    sol.hp.assign(M, 0.0);
    sol.P.assign(M, 0.0);
    sol.Pt.assign(M, 0.0);

    const double m0 = layer_mass(layer, 0);
    const double ds = sol.sigma[1] - sol.sigma[0];

    auto lam_norm = [&](const std::vector<double>& dh, const std::vector<double>& dhp) {
        double a = 0.0, b = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            a = std::max(a, std::abs(dh[j]));
            const double at = std::exp(sol.sigma[j]);
            b = std::max(b, at / sol.sigma[j] * std::abs(dhp[j]));
        }
        return a + b;
    };

    std::vector<double> h_new(M), hp_new(M);
    for (int it = 0; it < max_iter; ++it) {
        // current iterate as a modulation state
        ModulationState mod;
        mod.n = n;
        mod.h = [&](double t) { return sol.h_at(t); };
        mod.hp = [&](double t) { return sol.hp_at(t); };
        Ansatz anz(pot, layer, corr, cutoff, mod);

        // right-hand side on the grid
        for (std::size_t j = 0; j < M; ++j) {
            const double t = sgn * std::exp(sol.sigma[j]);
            sol.P[j] = reduced_P(anz, t, m0, dx);
            const double A = 0.5 * (n - 3) * sq(static_cast<double>(n - 1));
            const double g = gamma_n(n, t);
            const double hh = sol.h[j];
            sol.Pt[j] = sol.P[j] + A * (1.0 / cube(g) - 1.0 / cube(g + hh) -
                                        3.0 * hh / (g * g * g * g));
        }
        // integral transform: I(sigma_j) = int_{s0}^{sigma_j} e^{7 s / 4} Pt ds
        // (substituting s = log|t|), then h = -sgn ... wrapped below.
        std::vector<double> I(M, 0.0);
        for (std::size_t j = 1; j < M; ++j) {
            const double fa = std::exp(1.75 * sol.sigma[j - 1]) * sol.Pt[j - 1];
            const double fb = std::exp(1.75 * sol.sigma[j]) * sol.Pt[j];
            I[j] = I[j - 1] + 0.5 * ds * (fa + fb);
        }
        double diff_h = 0.0;
        for (std::size_t j = 0; j < M; ++j) {
            const double at = std::exp(sol.sigma[j]);
            // t < 0: h(t) = -(-t)^{-3/4} int_t^{-T0} (-s)^{3/4} Pt ds
            //             = +(-t)^{-3/4} I(sigma_j) * (orientation of ds)
            // t > 0 mirrors with the opposite sign.
            h_new[j] = sgn * std::pow(at, -0.75) * I[j];
            hp_new[j] = -3.0 * h_new[j] / (4.0 * sgn * at) + sol.Pt[j];
            diff_h = std::max(diff_h, std::abs(h_new[j] - sol.h[j]));
        }
        std::vector<double> dh(M), dhp(M);
        for (std::size_t j = 0; j < M; ++j) {
            dh[j] = h_new[j] - sol.h[j];
            dhp[j] = hp_new[j] - sol.hp[j];
        }
        const double lam = lam_norm(dh, dhp);
        sol.h = h_new;
        sol.hp = hp_new;
        sol.iterations = it + 1;
        if (it == 0) sol.p0_norm = lam_norm(sol.h, sol.hp);
        sol.final_diff = lam;
        if (lam < tol) break;
        if (it + 1 == max_iter)
            throw NumericalError("solve_reduced_ode: no contraction within iteration cap");
    }
    for (std::size_t j = 0; j < M; ++j)
        sol.sup_h_logt =
            std::max(sol.sup_h_logt, std::abs(sol.h[j]) * sol.sigma[j]);
    return sol;
}

// Forward initial-value variant on a finite window, h(t0) = 0; used to
// predict the modulation along an evolution run. RK2 with the lagged h'
// inside P-tilde.
inline ReducedSolution reduced_forward(const Potential& pot, const LayerTable& layer,
                                       const CorrectionTable& corr, const CutOff& cutoff,
                                       int n, double p, double t0, double t1,
                                       std::size_t steps = 256, double dx = 0.02) {
    if (!(p > n && p <= n + 1))
        throw std::invalid_argument("reduced_forward: p must lie in (n, n+1]");
    ReducedSolution sol;
    sol.n = n;
    sol.p = p;
    sol.That0 = std::abs(t0);
    const double sgn = (n == 2) ? 1.0 : -1.0;
    const double sa = std::log(std::abs(t0)), sb = std::log(std::abs(t1));
    const std::size_t M = steps + 1;
    sol.sigma.resize(M);
    for (std::size_t j = 0; j < M; ++j)
        sol.sigma[j] = sa + (sb - sa) * static_cast<double>(j) / (M - 1);
    sol.h.assign(M, 0.0);
    sol.hp.assign(M, 0.0);
    const double m0 = layer_mass(layer, 0);

    double h = 0.0, hp = 0.0;
    for (std::size_t j = 0; j + 1 < M; ++j) {
        const double ta = sgn * std::exp(sol.sigma[j]);
        const double tb = sgn * std::exp(sol.sigma[j + 1]);
        const double dt = tb - ta;
        auto rhs = [&](double t, double hval, double hpval) {
            ModulationState mod;
            mod.n = n;
            mod.h = [&](double) { return hval; };
            mod.hp = [&](double) { return hpval; };
            Ansatz anz(pot, layer, corr, cutoff, mod);
            return -3.0 * hval / (4.0 * t) + reduced_Ptilde(anz, t, m0, dx);
        };
        const double k1 = rhs(ta, h, hp);
        const double k2 = rhs(tb, h + dt * k1, k1);
        h += 0.5 * dt * (k1 + k2);
        hp = k2;
        sol.h[j + 1] = h;
        sol.hp[j + 1] = hp;
    }
    return sol;
}

}  // namespace wch

#endif
