#ifndef WCH_PDE_HPP
#define WCH_PDE_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wch/ansatz.hpp"
#include "wch/errors.hpp"
#include "wch/geometry.hpp"
#include "wch/numerics.hpp"
#include "wch/radial.hpp"

namespace wch {

struct EvolveParams {
    int n = 2;
    double t0 = 1e3;
    double t1 = 1e3 + 1.0;
    double dx = 0.02;
    double dt = 0.0;     // <= 0: auto, 0.1 dx^2
    double delta0 = 0.5;
    int checkpoints = 10;
    int snapshots = 0;
    bool stationary = false;  // required to evolve n in {1, 3}
};

struct EvolutionRun {
    EvolveParams prm;
    double dt_used = 0.0;
    double R_used = 0.0;
    std::vector<double> t_check;
    std::vector<double> rho_num;
    std::vector<double> energy;
    std::vector<std::pair<double, RadialField>> snaps;
    RadialField u_final;
    double max_energy_increase = 0.0;  // per-step, should stay <= 1e-8
    double max_abs_u = 0.0;
    bool single_interface = true;
};

// Zero of u in (delta0, R-5) by linear interpolation between the bracketing
// nodes; exactly one sign change is required.
inline double track_interface(const RadialField& u, double delta0) {
    const double rmax = u.grid.R() - 5.0;
    double crossing = -1.0;
    int count = 0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double r = u.grid.r(i);
        if (r <= delta0 || u.grid.r(i + 1) >= rmax) continue;
        if (u[i] == 0.0 || u[i] * u[i + 1] < 0.0) {
            ++count;
            const double w = u[i] / (u[i] - u[i + 1]);
            crossing = r + w * u.grid.dx;
        }
    }
    if (count != 1)
        throw TopologyError("track_interface: found " + std::to_string(count) +
                            " sign changes, need exactly 1");
    return crossing;
}

namespace detail {

// Semi-implicit stepper. The stiff linear part
//   A = -d_rrrr - 2(n-1)/r d_rrr + 2 W''(1) d_rr
// is treated implicitly with a prefactored pentadiagonal LU; the remaining
// terms of F go explicitly. Each step solves the increment form
//   (I - dt A) (u_new - u) = dt F(u),
// so a discrete equilibrium of F is preserved bit-exactly. Node M-1 at r = R
// is pinned to 1 (layer tail); ghosts mirror evenly across r = 0 and r = R.
// The 1/r-coefficient terms are dropped on the two mirror rows, where the
// solution is flat at -1 and the derivatives they multiply vanish.
class Stepper {
public:
    Stepper(const Potential& pot, int n, double dx, std::size_t M, double dt)
        : pot_(pot), n_(n), dx_(dx), M_(M), dt_(dt), st_(dx) {
        const double m = n - 1;
        w2eq_ = pot.eval(1.0, 2);
        const std::size_t N = M - 1;  // unknowns
        std::vector<double> c2(N, 0.0), c1(N, 0.0), d(N, 0.0), e1(N, 0.0), e2(N, 0.0);
        auto scatter = [&](std::size_t i, const std::vector<double>& w,
                           const std::ptrdiff_t* off, double coef) {
            for (int k = 0; k < 5; ++k) {
                std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + off[k];
                const double wk = coef * w[k];
                if (j < 0) j = -j - 2;  // even mirror through r = 0
                if (j >= static_cast<std::ptrdiff_t>(M))
                    j = 2 * static_cast<std::ptrdiff_t>(M) - 2 - j;  // even mirror at R
                if (j == static_cast<std::ptrdiff_t>(M) - 1) continue;  // pinned node
                switch (j - static_cast<std::ptrdiff_t>(i)) {
                    case -2: c2[i] += wk; break;
                    case -1: c1[i] += wk; break;
                    case 0: d[i] += wk; break;
                    case 1: e1[i] += wk; break;
                    case 2: e2[i] += wk; break;
                    default: throw NumericalError("Stepper: bandwidth exceeded");
                }
            }
        };
        static const std::ptrdiff_t off_c[5] = {-2, -1, 0, 1, 2};
        static const std::ptrdiff_t off_0[5] = {-3, -2, 0, 1, 2};
        static const std::ptrdiff_t off_1[5] = {-3, -1, 0, 1, 2};
        const std::vector<double> x0 = {-3 * dx, -2 * dx, 0.0, dx, 2 * dx};
        const std::vector<double> x1 = {-3 * dx, -dx, 0.0, dx, 2 * dx};
        // mirror rows: fourth derivative and frozen-coefficient diffusion
        // only (their 1/r terms are dropped)
        scatter(0, fd_weights(0.0, x0, 4), off_0, -1.0);
        scatter(0, fd_weights(0.0, x0, 2), off_0, 2.0 * w2eq_);
        scatter(1, fd_weights(0.0, x1, 4), off_1, -1.0);
        scatter(1, fd_weights(0.0, x1, 2), off_1, 2.0 * w2eq_);
        for (std::size_t i = 2; i < N; ++i) {
            const double r = dx * static_cast<double>(i + 1);
            scatter(i, st_.center(4), off_c, -1.0);
            scatter(i, st_.center(3), off_c, -2.0 * m / r);
            scatter(i, st_.center(2), off_c, 2.0 * w2eq_);
        }
        for (std::size_t i = 0; i < N; ++i) {
            c2[i] *= -dt;
            c1[i] *= -dt;
            d[i] = 1.0 - dt * d[i];
            e1[i] *= -dt;
            e2[i] *= -dt;
        }
        lu_.factor(c2, c1, d, e1, e2);

        const double cc = m * (n - 3);
        inv_r_.resize(M);
        a3_.resize(M);
        a2_.resize(M);
        a1w_.resize(M);
        a1c_.resize(M);
        rw_.resize(M);
        for (std::size_t i = 0; i < M; ++i) {
            const double r = dx * static_cast<double>(i + 1);
            inv_r_[i] = m / r;
            const bool inner = i < 2;
            a3_[i] = inner ? 0.0 : -2.0 * m / r;
            a2_[i] = inner ? 0.0 : -cc / (r * r);
            a1w_[i] = inner ? 0.0 : 2.0 * m / r;
            a1c_[i] = inner ? 0.0 : cc / (r * r * r);
            const double wgt = (i == 0 || i + 1 == M) ? 0.5 : 1.0;
            rw_[i] = wgt * std::pow(r, n - 1.0) * dx;
        }
    }

    // F(u) into f; returns the diffuse energy of u (trapezoid in r^{n-1} dr).
    double full_operator(const std::vector<double>& u, std::vector<double>& f) const {
        const std::size_t M = M_;
        const double w10 = st_.center(1)[0], w11 = st_.center(1)[1],
                     w13 = st_.center(1)[3], w14 = st_.center(1)[4];
        const double w20 = st_.center(2)[0], w21 = st_.center(2)[1],
                     w23 = st_.center(2)[3], w24 = st_.center(2)[4];
        const double w30 = st_.center(3)[0], w31 = st_.center(3)[1],
                     w33 = st_.center(3)[3], w34 = st_.center(3)[4];
        const double w40 = st_.center(4)[0], w41 = st_.center(4)[1],
                     w43 = st_.center(4)[3], w44 = st_.center(4)[4];
        const double* uu = u.data();
        double* ff = f.data();
        const double* a3 = a3_.data();
        const double* a2 = a2_.data();
        const double* a1w = a1w_.data();
        const double* a1c = a1c_.data();
        const double* ivr = inv_r_.data();
        const double* rw = rw_.data();
        double energy = 0.0;
        if (quartic_) {
            double e0 = 0.0, e1a = 0.0;
            std::size_t i = 2;
            for (; i + 3 < M; i += 2) {
                {
                    const double c = uu[i];
                    const double um2 = uu[i - 2] - c, um1 = uu[i - 1] - c;
                    const double up1 = uu[i + 1] - c, up2 = uu[i + 2] - c;
                    const double d1 = std::fma(w10, um2, w11 * um1) +
                                      std::fma(w14, up2, w13 * up1);
                    const double d2 = std::fma(w20, um2, w21 * um1) +
                                      std::fma(w24, up2, w23 * up1);
                    const double d3 = std::fma(w30, um2, w31 * um1) +
                                      std::fma(w34, up2, w33 * up1);
                    const double d4 = std::fma(w40, um2, w41 * um1) +
                                      std::fma(w44, up2, w43 * up1);
                    const double s2 = c * c;
                    const double w1 = c * (s2 - 1.0);
                    const double w2 = 3.0 * s2 - 1.0;
                    ff[i] = -d4 + a3[i] * d3 + std::fma(2.0, w2, a2[i]) * d2 +
                            std::fma(a1w[i], w2, a1c[i]) * d1 +
                            std::fma(6.0 * c, d1 * d1, -w1 * w2);
                    const double dev = std::fma(ivr[i], d1, d2) - w1;
                    e0 = std::fma(rw[i], dev * dev, e0);
                }
                {
                    const std::size_t j = i + 1;
                    const double c = uu[j];
                    const double um2 = uu[j - 2] - c, um1 = uu[j - 1] - c;
                    const double up1 = uu[j + 1] - c, up2 = uu[j + 2] - c;
                    const double d1 = std::fma(w10, um2, w11 * um1) +
                                      std::fma(w14, up2, w13 * up1);
                    const double d2 = std::fma(w20, um2, w21 * um1) +
                                      std::fma(w24, up2, w23 * up1);
                    const double d3 = std::fma(w30, um2, w31 * um1) +
                                      std::fma(w34, up2, w33 * up1);
                    const double d4 = std::fma(w40, um2, w41 * um1) +
                                      std::fma(w44, up2, w43 * up1);
                    const double s2 = c * c;
                    const double w1 = c * (s2 - 1.0);
                    const double w2 = 3.0 * s2 - 1.0;
                    ff[j] = -d4 + a3[j] * d3 + std::fma(2.0, w2, a2[j]) * d2 +
                            std::fma(a1w[j], w2, a1c[j]) * d1 +
                            std::fma(6.0 * c, d1 * d1, -w1 * w2);
                    const double dev = std::fma(ivr[j], d1, d2) - w1;
                    e1a = std::fma(rw[j], dev * dev, e1a);
                }
            }
            for (; i + 2 < M; ++i) {
                const double c = uu[i];
                const double um2 = uu[i - 2] - c, um1 = uu[i - 1] - c;
                const double up1 = uu[i + 1] - c, up2 = uu[i + 2] - c;
                const double d1 = std::fma(w10, um2, w11 * um1) +
                                  std::fma(w14, up2, w13 * up1);
                const double d2 = std::fma(w20, um2, w21 * um1) +
                                  std::fma(w24, up2, w23 * up1);
                const double d3 = std::fma(w30, um2, w31 * um1) +
                                  std::fma(w34, up2, w33 * up1);
                const double d4 = std::fma(w40, um2, w41 * um1) +
                                  std::fma(w44, up2, w43 * up1);
                const double s2 = c * c;
                const double w1 = c * (s2 - 1.0);
                const double w2 = 3.0 * s2 - 1.0;
                ff[i] = -d4 + a3[i] * d3 + std::fma(2.0, w2, a2[i]) * d2 +
                        std::fma(a1w[i], w2, a1c[i]) * d1 +
                        std::fma(6.0 * c, d1 * d1, -w1 * w2);
                const double dev = std::fma(ivr[i], d1, d2) - w1;
                e0 = std::fma(rw[i], dev * dev, e0);
            }
            energy = e0 + e1a;
        } else {
            for (std::size_t i = 2; i + 2 < M; ++i) {
                const double c = uu[i];
                const double um2 = uu[i - 2] - c, um1 = uu[i - 1] - c;
                const double up1 = uu[i + 1] - c, up2 = uu[i + 2] - c;
                const double d1 = w10 * um2 + w11 * um1 + w13 * up1 + w14 * up2;
                const double d2 = w20 * um2 + w21 * um1 + w23 * up1 + w24 * up2;
                const double d3 = w30 * um2 + w31 * um1 + w33 * up1 + w34 * up2;
                const double d4 = w40 * um2 + w41 * um1 + w43 * up1 + w44 * up2;
                const double w1 = pot_.eval(c, 1), w2 = pot_.eval(c, 2),
                             w3 = pot_.eval(c, 3);
                ff[i] = -d4 + a3[i] * d3 + (2.0 * w2 + a2[i]) * d2 +
                        (a1w[i] * w2 + a1c[i]) * d1 + w3 * d1 * d1 - w1 * w2;
                const double dev = d2 + ivr[i] * d1 - w1;
                energy += rw[i] * dev * dev;
            }
        }
        for (std::size_t i : {std::size_t(0), std::size_t(1), M - 2, M - 1}) {
            const double d1 = deriv_edge(u, i, 1), d2 = deriv_edge(u, i, 2);
            const double d3 = deriv_edge(u, i, 3), d4 = deriv_edge(u, i, 4);
            const double s = u[i];
            const double w1 = pot_.eval(s, 1), w2 = pot_.eval(s, 2),
                         w3 = pot_.eval(s, 3);
            ff[i] = -d4 + a3[i] * d3 + (2.0 * w2 + a2[i]) * d2 +
                    (a1w[i] * w2 + a1c[i]) * d1 + w3 * d1 * d1 - w1 * w2;
            const double dev = d2 + ivr[i] * d1 - w1;
            energy += rw[i] * dev * dev;
        }
        return 0.5 * unit_sphere_area(n_) * energy;
    }

    // one IMEX step in place; returns the energy of the consumed state and
    // tracks the new sup norm
    double step(std::vector<double>& u, std::vector<double>& f,
                std::vector<double>& rhs, std::vector<double>& delta,
                double* max_abs = nullptr) const {
        const double energy = full_operator(u, f);
        const std::size_t N = M_ - 1;
        for (std::size_t i = 0; i < N; ++i) rhs[i] = dt_ * f[i];
        lu_.solve(rhs.data(), delta.data());
        double mx = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            u[i] += delta[i];
            mx = std::max(mx, std::abs(u[i]));
        }
        if (max_abs) *max_abs = std::max(mx, std::abs(u[N]));
        return energy;
    }

    void set_quartic(bool q) { quartic_ = q; }

private:
    // boundary rows: the two axis rows reuse the skewed mirror stencils (the
    // same point sets as the implicit matrix); the two outer rows reflect
    // evenly about the pinned node at r = R
    double deriv_edge(const std::vector<double>& u, std::size_t i, int m) const {
        if (i < 2) return st_.deriv(u, i, m);
        const std::size_t M = M_;
        auto at = [&](std::ptrdiff_t j) {
            if (j >= static_cast<std::ptrdiff_t>(M))
                j = 2 * static_cast<std::ptrdiff_t>(M) - 2 - j;
            return u[j];
        };
        const auto& w = st_.center(m);
        const double c = u[i];
        const auto ii = static_cast<std::ptrdiff_t>(i);
        return w[0] * (at(ii - 2) - c) + w[1] * (at(ii - 1) - c) +
               w[3] * (at(ii + 1) - c) + w[4] * (at(ii + 2) - c);
    }

    const Potential& pot_;
    int n_;
    double dx_;
    std::size_t M_;
    double dt_;
    Stencils st_;
    double w2eq_ = 2.0;
    bool quartic_ = true;
    PentaLU lu_;
    std::vector<double> inv_r_, a3_, a2_, a1w_, a1c_, rw_;
};

}  // namespace detail

// Forward time integration of the radial flow with semi-implicit splitting.
inline EvolutionRun evolve(const Potential& pot, const RadialField& initial,
                           const EvolveParams& prm_in) {
    EvolveParams prm = prm_in;
    const int n = prm.n;
    if ((n == 1 || n == 3) && !prm.stationary)
        throw std::invalid_argument(
            "evolve: degenerate dimension (n = " + std::to_string(n) +
            "): spheres are stationary; pass stationary=true to run anyway");
    if (!(prm.t1 > prm.t0)) throw std::invalid_argument("evolve: t1 > t0");
    const double dt_cap = 0.1 * prm.dx * prm.dx;
    double dt = (prm.dt > 0.0) ? prm.dt : dt_cap;
    if (dt > dt_cap * (1.0 + 1e-12))
        throw std::invalid_argument("evolve: dt must satisfy dt <= 0.1 dx^2");
    if (n != 1 && n != 3) {
        const double text = (n == 2) ? prm.t1 : prm.t0;
        if (initial.grid.R() < gamma_n(n, text) + 40.0 - 1e-9)
            throw CoverageError("evolve: R must cover gamma_n + 40");
    }

    const std::size_t M = initial.grid.n;
    const auto steps = static_cast<long>(std::ceil((prm.t1 - prm.t0) / dt - 1e-9));
    dt = (prm.t1 - prm.t0) / static_cast<double>(steps);

    EvolutionRun run;
    run.prm = prm;
    run.dt_used = dt;
    run.R_used = initial.grid.R();

    detail::Stepper stepper(pot, n, initial.grid.dx, M, dt);
    stepper.set_quartic(pot.kind() == PotentialKind::Quartic);
    std::vector<double> u = initial.v, f(M), rhs(M - 1), delta(M - 1);

    const long per_check = std::max<long>(1, steps / std::max(1, prm.checkpoints));
    const long per_snap =
        prm.snapshots > 0 ? std::max<long>(1, steps / prm.snapshots) : 0;

    auto record = [&](double t) {
        RadialField uf(initial.grid, u);
        run.t_check.push_back(t);
        try {
            run.rho_num.push_back(track_interface(uf, prm.delta0));
        } catch (const TopologyError&) {
            run.single_interface = false;
            run.rho_num.push_back(std::numeric_limits<double>::quiet_NaN());
        }
        run.energy.push_back(diffuse_energy(pot, uf, n));
    };
    record(prm.t0);

    double e_prev = 0.0;
    for (long k = 0; k < steps; ++k) {
        double mx = 0.0;
        const double e_here = stepper.step(u, f, rhs, delta, &mx);
        if (k > 0)
            run.max_energy_increase = std::max(run.max_energy_increase, e_here - e_prev);
        e_prev = e_here;
        run.max_abs_u = std::max(run.max_abs_u, mx);
        if (mx > 1.05)
            throw InstabilityError("evolve: |u| exceeded 1.05 at step " +
                                   std::to_string(k + 1));
        const double t = prm.t0 + static_cast<double>(k + 1) * dt;
        if ((k + 1) % per_check == 0 || k + 1 == steps) record(t);
        if (per_snap > 0 && ((k + 1) % per_snap == 0))
            run.snaps.emplace_back(t, RadialField(initial.grid, u));
    }
    run.u_final = RadialField(initial.grid, u);
    return run;
}

}  // namespace wch

#endif
