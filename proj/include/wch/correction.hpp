#ifndef WCH_CORRECTION_HPP
#define WCH_CORRECTION_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "wch/layer.hpp"
#include "wch/numerics.hpp"

namespace wch {

// Correction layer
//   wt(y) = -omega'(y) int_0^y [ (omega'(yh))^{-2} I(yh) ] dyh,
//   I(yh) = int_{-inf}^{yh} s (omega'(s))^2 / 2 ds,
// tabulated with derivatives through order 4 via repeated differentiation of
// the product (no use of the operator identities, so residual checks on them
// stay meaningful).
struct CorrectionTable {
    double Y = 0.0;
    double step = 0.0;
    double alpha = 0.0;
    std::vector<double> wt, wt1, wt2, wt3, wt4, wt5;
    // tail polynomial: for y > Y-2,  G(y) ~ -(y^2/(8a) + k1 y - k0) and
    // wt(y) ~ alpha*beta*e^{-alpha y} (y^2/(8a) + k1 y - k0)
    double tail_k1 = 0.0, tail_k0 = 0.0, tail_ab = 0.0;
    double envelope_C = 0.0;        // minimal C with |wt| <= C e^{-3 alpha |y|/4}
    double fitted_exponent = 0.0;   // observed decay rate of wt on the far field

    std::size_t size() const { return wt.size(); }
    double y_at(std::size_t i) const { return -Y + static_cast<double>(i) * step; }

    double eval(double y, int k) const {
        const double ay = std::abs(y);
        if (ay <= Y - 2.0) return interp(y, k);
        if (ay >= Y - 1.0) return tail(y, k);
        const double w = ay - (Y - 2.0);
        return (1.0 - w) * interp(y, k) + w * tail(y, k);
    }

    double interp(double y, int k) const {
        const double x0 = -Y;
        switch (k) {
            case 0: return hermite_eval(wt, wt1, x0, step, y);
            case 1: return hermite_eval(wt1, wt2, x0, step, y);
            case 2: return hermite_eval(wt2, wt3, x0, step, y);
            case 3: return hermite_eval(wt3, wt4, x0, step, y);
            case 4: return hermite_eval(wt4, wt5, x0, step, y);
            default: throw std::invalid_argument("CorrectionTable::eval: k must be 0..4");
        }
    }

    // e^{-alpha y} p(y) with p quadratic; k-th derivative applies (d/dy - alpha)^k to p.
    double tail(double y, int k) const {
        const double ay = std::abs(y);
        // p, p', p'' for p(y) = y^2/(8 alpha_q) ... coefficients stored via k1,k0
        double a2 = 1.0 / (8.0 * alpha_q_), a1 = tail_k1, a0 = -tail_k0;
        for (int j = 0; j < k; ++j) {
            // (e^{-a y} p)' = e^{-a y} (p' - a p)
            const double b2 = -alpha_q_ * a2;
            const double b1 = 2.0 * a2 - alpha_q_ * a1;
            const double b0 = a1 - alpha_q_ * a0;
            a2 = b2;
            a1 = b1;
            a0 = b0;
        }
        const double v = tail_ab * std::exp(-alpha_q_ * ay) * ((a2 * ay + a1) * ay + a0);
        if (y >= 0.0) return v;
        return (k % 2 == 0 ? -v : v);  // wt is odd
    }

    double alpha_q_ = 0.0;  // copy of alpha used in the tail polynomial
};

inline CorrectionTable build_correction(const LayerTable& layer) {
    const double h = layer.step;
    const double Y = layer.Y;
    const double a = layer.alpha;
    const double b = layer.beta;
    const std::size_t m = layer.size();

    CorrectionTable c;
    c.Y = Y;
    c.step = h;
    c.alpha = a;
    c.alpha_q_ = a;
    c.tail_ab = a * b;

    // inner integral I(y) accumulated left to right, analytic tail below -Y:
    // int_{-inf}^{-Y} s (a b e^{a s})^2/2 ds = (a^2 b^2/2) e^{-2aY} (-Y/(2a) - 1/(4a^2))
    std::vector<double> f(m), fp(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double y = layer.y_at(i);
        const double d1 = layer.om1[i], d2 = layer.om2[i];
        f[i] = 0.5 * y * d1 * d1;
        fp[i] = 0.5 * d1 * d1 + y * d1 * d2;
    }
    const double i_tail =
        0.5 * a * a * b * b * std::exp(-2.0 * a * Y) * (-Y / (2.0 * a) - 1.0 / (4.0 * a * a));
    std::vector<double> I = prefix_integral(f, fp, h, i_tail);
    // I is even (the integrand is odd with vanishing total integral). The
    // left half is accurate -- each value is dominated by nearby intervals --
    // but by y ~ +13 the true value decays below the accumulated roundoff and
    // the quotient by (omega')^2 would amplify that noise like e^{2 alpha y}.
    // Mirroring restores full relative accuracy on the right half.
    const std::size_t mid = (m - 1) / 2;
    for (std::size_t k = 1; k <= mid; ++k) I[mid + k] = I[mid - k];

    // g = I / (omega')^2 and its derivatives via q = omega''/omega'
    std::vector<double> g(m), gp(m), gpp(m), gppp(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double y = layer.y_at(i);
        const double d1 = layer.om1[i], d2 = layer.om2[i];
        const double w2 = layer.pot.eval(layer.om[i], 2);
        const double w3 = layer.pot.eval(layer.om[i], 3);
        const double q = d2 / d1;
        const double qp = w2 - q * q;
        const double qpp = w3 * d1 - 2.0 * q * qp;
        g[i] = I[i] / (d1 * d1);
        gp[i] = -2.0 * q * g[i] + 0.5 * y;
        gpp[i] = -2.0 * qp * g[i] - 2.0 * q * gp[i] + 0.5;
        gppp[i] = -2.0 * qpp * g[i] - 4.0 * qp * gp[i] - 2.0 * q * gpp[i];
    }

    // outer integral G(y) = int_0^y g, anchored at the center node; g is even
    // so G is odd -- anti-symmetrize to keep that exact
    std::vector<double> G = prefix_integral(g, gp, h, 0.0);
    const std::size_t m0 = mid;
    const double g0 = G[m0];
    for (auto& v : G) v -= g0;
    for (std::size_t k = 1; k <= mid; ++k) {
        const double odd = 0.5 * (G[mid + k] - G[mid - k]);
        G[mid + k] = odd;
        G[mid - k] = -odd;
    }
    G[mid] = 0.0;

    c.wt.resize(m);
    c.wt1.resize(m);
    c.wt2.resize(m);
    c.wt3.resize(m);
    c.wt4.resize(m);
    c.wt5.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double o1 = layer.om1[i], o2 = layer.om2[i], o3 = layer.om3[i],
                     o4 = layer.om4[i], o5 = layer.om5[i];
        c.wt[i] = -(o1 * G[i]);
        c.wt1[i] = -(o2 * G[i] + o1 * g[i]);
        c.wt2[i] = -(o3 * G[i] + 2.0 * o2 * g[i] + o1 * gp[i]);
        c.wt3[i] = -(o4 * G[i] + 3.0 * o3 * g[i] + 3.0 * o2 * gp[i] + o1 * gpp[i]);
        c.wt4[i] = -(o5 * G[i] + 4.0 * o4 * g[i] + 6.0 * o3 * gp[i] + 4.0 * o2 * gpp[i] +
                     o1 * gppp[i]);
        c.wt5[i] = 0.0;  // filled below by one-sided differentiation of wt4
    }
    // wt5 only steers the Hermite interpolation of wt4; centered differences
    // of wt4 at table resolution are more than accurate enough for that.
    for (std::size_t i = 0; i < m; ++i) {
        if (i >= 2 && i + 2 < m)
            c.wt5[i] = (c.wt4[i - 2] - 8.0 * c.wt4[i - 1] + 8.0 * c.wt4[i + 1] -
                        c.wt4[i + 2]) /
                       (12.0 * h);
        else if (i + 1 < m)
            c.wt5[i] = (c.wt4[i + 1] - c.wt4[i]) / h;
        else
            c.wt5[i] = (c.wt4[i] - c.wt4[i - 1]) / h;
    }

    // tail polynomial fit at y0 = Y-2 (positive side): g ~ -(y/(4a) + k1)
    {
        const auto i0 = static_cast<std::size_t>(std::llround((Y - 2.0 + Y) / h));
        const double y0 = layer.y_at(i0);
        c.tail_k1 = -g[i0] - y0 / (4.0 * a);
        // G(y) = -(y^2/(8a) + k1 y - k0); match at y0
        c.tail_k0 = G[i0] + y0 * y0 / (8.0 * a) + c.tail_k1 * y0;
    }

    // decay envelope |wt| <= C e^{-3 alpha |y|/4}: minimal valid C on the table
    double C = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        C = std::max(C, std::abs(c.wt[i]) * std::exp(0.75 * a * std::abs(layer.y_at(i))));
    c.envelope_C = C;

    // observed exponent: log-slope of |wt| between Y/2 and Y-3
    {
        const auto i1 = static_cast<std::size_t>(std::llround((0.5 * Y + Y) / h));
        const auto i2 = static_cast<std::size_t>(std::llround((Y - 3.0 + Y) / h));
        const double l1 = std::log(std::abs(c.wt[i1])), l2 = std::log(std::abs(c.wt[i2]));
        c.fitted_exponent = -(l2 - l1) / (layer.y_at(i2) - layer.y_at(i1));
    }
    return c;
}

// Residuals of the two defining operator identities, evaluated with the
// analytically differentiated table (sup over |y| <= ywin):
//   (i)  -wt'' + W''(omega) wt - y omega'/2
//   (ii) (L*)^2 wt + omega''
struct CorrectionIdentityReport {
    double res_first = 0.0;
    double res_second = 0.0;
    double res_first_at0 = 0.0;
    double res_second_at0 = 0.0;
    double orthogonality = 0.0;  // int omega' wt dy
};

inline CorrectionIdentityReport check_identities(const CorrectionTable& c,
                                                 const LayerTable& layer,
                                                 double ywin = 20.0) {
    CorrectionIdentityReport rep;
    const std::size_t m = layer.size();
    std::vector<double> prod(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double y = layer.y_at(i);
        const double s = layer.om[i];
        const double o1 = layer.om1[i], o2 = layer.om2[i];
        const double w2 = layer.pot.eval(s, 2), w3 = layer.pot.eval(s, 3);
        const double w4 = layer.pot.max_order() >= 4 ? layer.pot.eval(s, 4) : 0.0;
        const double r1 = -c.wt2[i] + w2 * c.wt[i] - 0.5 * y * o1;
        const double lstar2 = c.wt4[i] - w4 * o1 * o1 * c.wt[i] - w3 * o2 * c.wt[i] -
                              2.0 * w3 * o1 * c.wt1[i] - 2.0 * w2 * c.wt2[i] +
                              w2 * w2 * c.wt[i];
        const double r2 = lstar2 + o2;
        if (std::abs(y) <= ywin) {
            rep.res_first = std::max(rep.res_first, std::abs(r1));
            rep.res_second = std::max(rep.res_second, std::abs(r2));
        }
        if (y == 0.0) {
            rep.res_first_at0 = std::abs(r1);
            rep.res_second_at0 = std::abs(r2);
        }
        prod[i] = o1 * c.wt[i];
    }
    rep.orthogonality = std::abs(simpson(prod, layer.step));
    return rep;
}

}  // namespace wch

#endif
