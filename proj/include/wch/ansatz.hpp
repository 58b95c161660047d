#ifndef WCH_ANSATZ_HPP
#define WCH_ANSATZ_HPP

#include <cmath>
#include <limits>
#include <vector>

#include "wch/correction.hpp"
#include "wch/cutoff.hpp"
#include "wch/errors.hpp"
#include "wch/layer.hpp"
#include "wch/modulation.hpp"
#include "wch/numerics.hpp"
#include "wch/potential.hpp"
#include "wch/radial.hpp"

namespace wch {

// ---------------------------------------------------------------------------
// The quasilinear operator F and its linearizations (radial form).
// ---------------------------------------------------------------------------

// F(u) at one node given radius and derivatives through order 4:
//   F(u) = -u'''' - 2(n-1)/r u''' + (2W''(u) - (n-1)(n-3)/r^2) u''
//          + (2(n-1)W''(u)/r + (n-1)(n-3)/r^3) u' + W'''(u) u'^2 - W'(u)W''(u)
inline double F_pointwise(const Potential& pot, int n, double r, double u, double u1,
                          double u2, double u3, double u4) {
    const double m = n - 1;
    const double c2 = m * (n - 3);
    const double w1 = pot.eval(u, 1), w2 = pot.eval(u, 2), w3 = pot.eval(u, 3);
    return -u4 - 2.0 * m / r * u3 + (2.0 * w2 - c2 / (r * r)) * u2 +
           (2.0 * m * w2 / r + c2 / (r * r * r)) * u1 + w3 * u1 * u1 - w1 * w2;
}

// F'(z)[phi] at one node; z enters through value and first two derivatives.
inline double Fprime_pointwise(const Potential& pot, int n, double r, double z0,
                               double z1, double z2, double p0, double p1, double p2,
                               double p3, double p4) {
    const double m = n - 1;
    const double c2 = m * (n - 3);
    const double w1 = pot.eval(z0, 1), w2 = pot.eval(z0, 2), w3 = pot.eval(z0, 3),
                 w4 = pot.eval(z0, 4);
    return -p4 - 2.0 * m / r * p3 + (2.0 * w2 - c2 / (r * r)) * p2 - w2 * w2 * p0 +
           (2.0 * m * w2 / r + c2 / (r * r * r)) * p1 + 2.0 * w3 * p1 * z1 -
           w3 * w1 * p0 + w4 * z1 * z1 * p0 + 2.0 * w3 * z2 * p0 +
           2.0 * m / r * w3 * z1 * p0;
}

// Nodewise F via the five-point stencils (mirror ghosts at the axis,
// one-sided rows at the outer edge).
inline RadialField apply_F(const Potential& pot, const RadialField& u, int n) {
    if (u.size() < 10) throw CoverageError("apply_F: need >= 5 nodes margin");
    Stencils st(u.grid.dx);
    RadialField out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = u.grid.r(i);
        out[i] = F_pointwise(pot, n, r, u[i], st.deriv(u.v, i, 1), st.deriv(u.v, i, 2),
                             st.deriv(u.v, i, 3), st.deriv(u.v, i, 4));
    }
    return out;
}

inline RadialField apply_Fprime(const Potential& pot, const RadialField& z,
                                const RadialField& phi, int n) {
    if (!(z.grid == phi.grid)) throw CoverageError("apply_Fprime: grids differ");
    Stencils st(z.grid.dx);
    RadialField out(z.grid);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double r = z.grid.r(i);
        out[i] = Fprime_pointwise(pot, n, r, z[i], st.deriv(z.v, i, 1),
                                  st.deriv(z.v, i, 2), phi[i], st.deriv(phi.v, i, 1),
                                  st.deriv(phi.v, i, 2), st.deriv(phi.v, i, 3),
                                  st.deriv(phi.v, i, 4));
    }
    return out;
}

// Second linearization, in the displayed form
//   F''(u)[v1,v2] = Lap[W'''(u) v1 v2]
//                   - { W'''(u)W''(u) + W''''(u)(-Lap u + W'(u)) } v1 v2
//                   + W'''(u){ (Lap v1 - W''(u) v1) v2 + (Lap v2 - W''(u) v2) v1 }
// with the radial Laplacian Lap f = f'' + (n-1)/r f'.
inline RadialField apply_Fsecond(const Potential& pot, const RadialField& u,
                                 const RadialField& v1, const RadialField& v2, int n) {
    if (!(u.grid == v1.grid) || !(u.grid == v2.grid))
        throw CoverageError("apply_Fsecond: grids differ");
    Stencils st(u.grid.dx);
    const double m = n - 1;
    const std::size_t nn = u.size();
    auto lap = [&](const std::vector<double>& f, std::size_t i) {
        return st.deriv(f, i, 2) + m / u.grid.r(i) * st.deriv(f, i, 1);
    };
    // group v1*v2 first: (X*v1)*v2 and (X*v2)*v1 round differently, and the
    // symmetry F''[v1,v2] = F''[v2,v1] should hold bitwise
    std::vector<double> w(nn);
    for (std::size_t i = 0; i < nn; ++i) w[i] = pot.eval(u[i], 3) * (v1[i] * v2[i]);
    RadialField out(u.grid);
    for (std::size_t i = 0; i < nn; ++i) {
        const double w1 = pot.eval(u[i], 1), w2 = pot.eval(u[i], 2),
                     w3 = pot.eval(u[i], 3), w4 = pot.eval(u[i], 4);
        const double lap_u = lap(u.v, i);
        out[i] = lap(w, i) - (w3 * w2 + w4 * (-lap_u + w1)) * (v1[i] * v2[i]) +
                 w3 * ((lap(v1.v, i) - w2 * v1[i]) * v2[i] +
                       (lap(v2.v, i) - w2 * v2[i]) * v1[i]);
    }
    return out;
}

// N(phi) = F(z + phi) - F(z) - F'(z)[phi], by direct evaluation.
inline RadialField nonlinear_N(const Potential& pot, const RadialField& z,
                               const RadialField& phi, int n) {
    RadialField zp(z.grid);
    for (std::size_t i = 0; i < z.size(); ++i) zp[i] = z[i] + phi[i];
    const RadialField a = apply_F(pot, zp, n);
    const RadialField b = apply_F(pot, z, n);
    const RadialField c = apply_Fprime(pot, z, phi, n);
    RadialField out(z.grid);
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = a[i] - b[i] - c[i];
    return out;
}

// ---------------------------------------------------------------------------
// Ansatz assembly.
// ---------------------------------------------------------------------------

// All ingredients of the approximate solution
//   z(t,r) = [omega(r-rho) + (n-1)(n-3) r^{-2} wt(r-rho)] chi(r) + chi(r) - 1.
struct Ansatz {
    const Potential* pot = nullptr;
    const LayerTable* layer = nullptr;
    const CorrectionTable* corr = nullptr;
    CutOff cutoff;
    ModulationState mod;

    Ansatz(const Potential& p, const LayerTable& l, const CorrectionTable& c,
           const CutOff& co, const ModulationState& m)
        : pot(&p), layer(&l), corr(&c), cutoff(co), mod(m) {}

    int n() const { return mod.n; }
    double c2() const { return static_cast<double>((mod.n - 1) * (mod.n - 3)); }

    void require_coverage(double t, const RadialGrid& grid) const {
        if (grid.R() < mod.rho(t) + 30.0)
            throw CoverageError("ansatz: grid must cover rho(t) + 30");
    }

    // z values (any r) and the analytic time derivative.
    RadialField z_field(double t, const RadialGrid& grid) const {
        require_coverage(t, grid);
        const double rho = mod.rho(t);
        RadialField out(grid);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double r = grid.r(i);
            const double chi = cutoff.value(r);
            if (chi == 0.0) {
                out[i] = -1.0;
                continue;
            }
            const double y = r - rho;
            out[i] = (layer->eval(y, 0) + c2() / (r * r) * corr->eval(y, 0)) * chi +
                     chi - 1.0;
        }
        return out;
    }

    RadialField dz_dt(double t, const RadialGrid& grid) const {
        const double rho = mod.rho(t), rp = mod.rhop(t);
        RadialField out(grid);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double r = grid.r(i);
            const double chi = cutoff.value(r);
            if (chi == 0.0) continue;
            const double y = r - rho;
            out[i] = -rp * (layer->eval(y, 1) + c2() / (r * r) * corr->eval(y, 1)) * chi;
        }
        return out;
    }

    // Analytic radial derivatives of z at one point, valid off the cut-off
    // collar (r >= delta0, where chi == 1, or r <= delta0/2, where z == -1).
    struct ZDeriv {
        double z = 0.0, z1 = 0.0, z2 = 0.0, z3 = 0.0, z4 = 0.0, zt = 0.0;
    };

    ZDeriv z_analytic(double t, double r) const {
        ZDeriv d;
        if (r <= 0.5 * cutoff.delta0()) {
            d.z = -1.0;
            return d;
        }
        if (r < cutoff.delta0())
            throw CoverageError("z_analytic: inside the cut-off collar");
        const double rho = mod.rho(t), rp = mod.rhop(t);
        const double y = r - rho;
        const double a = c2();
        const double w0 = layer->eval(y, 0), w1 = layer->eval(y, 1),
                     w2 = layer->eval(y, 2), w3 = layer->eval(y, 3),
                     w4 = layer->eval(y, 4);
        const double q0 = corr->eval(y, 0), q1 = corr->eval(y, 1),
                     q2 = corr->eval(y, 2), q3 = corr->eval(y, 3),
                     q4 = corr->eval(y, 4);
        const double r2 = 1.0 / (r * r), r3 = r2 / r, r4 = r3 / r, r5 = r4 / r,
                     r6 = r5 / r;
        d.z = w0 + a * r2 * q0;
        d.z1 = w1 + a * (r2 * q1 - 2.0 * r3 * q0);
        d.z2 = w2 + a * (r2 * q2 - 4.0 * r3 * q1 + 6.0 * r4 * q0);
        d.z3 = w3 + a * (r2 * q3 - 6.0 * r3 * q2 + 18.0 * r4 * q1 - 24.0 * r5 * q0);
        d.z4 = w4 + a * (r2 * q4 - 8.0 * r3 * q3 + 36.0 * r4 * q2 - 96.0 * r5 * q1 +
                         120.0 * r6 * q0);
        d.zt = -rp * (w1 + a * r2 * q1);
        return d;
    }

    // First approximation omega_hat = omega(r - rho) chi + chi - 1 and the
    // correction summand ztilde = (n-1)(n-3) r^{-2} wt(r - rho) chi.
    RadialField omega_hat_field(double t, const RadialGrid& grid) const {
        const double rho = mod.rho(t);
        RadialField out(grid);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double r = grid.r(i);
            const double chi = cutoff.value(r);
            out[i] = (chi == 0.0) ? -1.0 : layer->eval(r - rho, 0) * chi + chi - 1.0;
        }
        return out;
    }

    RadialField ztilde_field(double t, const RadialGrid& grid) const {
        const double rho = mod.rho(t);
        RadialField out(grid);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double r = grid.r(i);
            const double chi = cutoff.value(r);
            if (chi != 0.0) out[i] = c2() / (r * r) * corr->eval(r - rho, 0) * chi;
        }
        return out;
    }

    RadialField d_omega_hat_dt(double t, const RadialGrid& grid) const {
        const double rho = mod.rho(t), rp = mod.rhop(t);
        RadialField out(grid);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double chi = cutoff.value(grid.r(i));
            if (chi != 0.0) out[i] = -rp * layer->eval(grid.r(i) - rho, 1) * chi;
        }
        return out;
    }

    RadialField d_ztilde_dt(double t, const RadialGrid& grid) const {
        const double rho = mod.rho(t), rp = mod.rhop(t);
        RadialField out(grid);
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double r = grid.r(i);
            const double chi = cutoff.value(r);
            if (chi != 0.0) out[i] = -rp * c2() / (r * r) * corr->eval(r - rho, 1) * chi;
        }
        return out;
    }

    // Two-term error split:
    //   E1 = F(omega_hat) - dt omega_hat + c2/r^2 (omega_hat)_rr
    //        + c2 (n-3)/(2 r^3) (omega_hat)_r
    //   E2 = -[those two terms] + [F(z) - F(omega_hat)] - dt ztilde,
    // the second bracket being the exact Taylor remainder form, so that
    // E1 + E2 reproduces E identically.
    void error_split(double t, const RadialGrid& grid, RadialField& e1,
                     RadialField& e2) const {
        const RadialField oh = omega_hat_field(t, grid);
        const RadialField z = z_field(t, grid);
        const RadialField f_oh = apply_F(*pot, oh, n());
        const RadialField f_z = apply_F(*pot, z, n());
        const RadialField oht = d_omega_hat_dt(t, grid);
        const RadialField ztt = d_ztilde_dt(t, grid);
        Stencils st(grid.dx);
        e1 = RadialField(grid);
        e2 = RadialField(grid);
        const double a = c2();
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double r = grid.r(i);
            const double extra = a / (r * r) * st.deriv(oh.v, i, 2) +
                                 a * (n() - 3) / (2.0 * r * r * r) * st.deriv(oh.v, i, 1);
            e1[i] = f_oh[i] - oht[i] + extra;
            e2[i] = -extra + (f_z[i] - f_oh[i]) - ztt[i];
        }
    }

    // E(t,r) = F(z) - dz/dt, stencil path (valid on the whole grid).
    RadialField error_field(double t, const RadialGrid& grid) const {
        const RadialField z = z_field(t, grid);
        const RadialField zt = dz_dt(t, grid);
        RadialField e = apply_F(*pot, z, n());
        for (std::size_t i = 0; i < grid.n; ++i) e[i] -= zt[i];
        return e;
    }

    // E(t,r) through the analytic derivative chain; exact 0 below the collar,
    // stencil fallback inside it.
    RadialField error_field_analytic(double t, const RadialGrid& grid) const {
        RadialField e(grid);
        const double d0 = cutoff.delta0();
        RadialField fd;  // lazy stencil path for the collar
        bool have_fd = false;
        for (std::size_t i = 0; i < grid.n; ++i) {
            const double r = grid.r(i);
            if (r <= 0.5 * d0) {
                e[i] = 0.0;
            } else if (r < d0) {
                if (!have_fd) {
                    fd = error_field(t, grid);
                    have_fd = true;
                }
                e[i] = fd[i];
            } else {
                const ZDeriv d = z_analytic(t, r);
                e[i] = F_pointwise(*pot, n(), r, d.z, d.z1, d.z2, d.z3, d.z4) - d.zt;
            }
        }
        return e;
    }
};

// ---------------------------------------------------------------------------
// Weight, weighted norm, diffuse energy.
// ---------------------------------------------------------------------------

// Two-branch weight of the error estimate: a polynomial window of width p
// centered at gamma_n(t) + log|t|/(4 alpha) for r >= delta0, the plain
// prefactor log|t|/sqrt|t| on the collar [delta0/2, delta0), zero below.
inline double weight_phi(int n, double t, double r, double p, double alpha,
                         double delta0 = 0.5) {
    if (!(p > n && p <= n + 1))
        throw std::invalid_argument("weight_phi: p must lie in (n, n+1]");
    if ((n == 2 && t <= 1.0) || (n >= 4 && t >= -1.0))
        throw std::domain_error("weight_phi: sign of t incompatible with dimension");
    const double at = std::abs(t);
    const double hbar = std::log(at) / std::sqrt(at);
    if (r < 0.5 * delta0) return 0.0;
    if (r < delta0) return hbar;
    const double center = gamma_n(n, t) + std::log(at) / (4.0 * alpha);
    return hbar / std::pow(1.0 + std::abs(r - center), p);
}

// sup |psi| / Phi over the grid; +infinity when psi is nonzero where Phi = 0.
inline double weighted_norm(const RadialField& psi, int n, double t, double p,
                            double alpha, double delta0 = 0.5) {
    double sup = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double phi = weight_phi(n, t, psi.grid.r(i), p, alpha, delta0);
        if (phi == 0.0) {
            if (psi[i] != 0.0) return std::numeric_limits<double>::infinity();
            continue;
        }
        sup = std::max(sup, std::abs(psi[i]) / phi);
    }
    return sup;
}

// Diffuse interface energy (1/2) |S^{n-1}| int (Lap u - W'(u))^2 r^{n-1} dr.
inline double diffuse_energy(const Potential& pot, const RadialField& u, int n) {
    Stencils st(u.grid.dx);
    const double m = n - 1;
    std::vector<double> integrand(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = u.grid.r(i);
        const double lap = st.deriv(u.v, i, 2) + m / r * st.deriv(u.v, i, 1);
        integrand[i] = sq(lap - pot.eval(u[i], 1)) * std::pow(r, m);
    }
    return 0.5 * unit_sphere_area(n) * simpson(integrand, u.grid.dx);
}

}  // namespace wch

#endif
