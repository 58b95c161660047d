#ifndef WCH_LAYER_HPP
#define WCH_LAYER_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "wch/errors.hpp"
#include "wch/numerics.hpp"
#include "wch/potential.hpp"

namespace wch {

// lambda(s) = int_0^s (2 (W(tau)-W(1)))^{-1/2} dtau, the inverse of the layer
// profile. The integrand blows up like 1/(alpha (1-tau)) at tau -> 1; the
// substitution tau = 1 - e^{-v} removes the singularity exactly.
inline double lambda_of_s(const Potential& pot, double s) {
    if (!(std::abs(s) < 1.0)) throw std::domain_error("lambda_of_s: |s| must be < 1");
    const double as = std::abs(s);
    if (as == 0.0) return 0.0;
    auto direct = [&](double tau) { return 1.0 / std::sqrt(2.0 * pot.excess(tau)); };
    auto subst = [&](double v) {
        const double e = std::exp(-v);
        return e / std::sqrt(2.0 * pot.excess1m(e));
    };
    const double s0 = 0.9;
    double val;
    if (as <= s0) {
        val = integrate(direct, 0.0, as, 1e-13);
    } else {
        val = integrate(direct, 0.0, s0, 1e-13) +
              integrate(subst, -std::log(1.0 - s0), -std::log(1.0 - as), 1e-13);
    }
    return s > 0 ? val : -val;
}

// beta = exp{ alpha int_0^1 [ (2(W-W(1)))^{-1/2} - (alpha(1-s))^{-1} ] ds }.
// Same substitution: the subtracted pole becomes the exact constant 1/alpha,
// and the integrand decays like e^{-v}.
inline double beta_constant(const Potential& pot) {
    const double alpha = pot.alpha();
    auto f = [&](double v) {
        const double e = std::exp(-v);
        return e / std::sqrt(2.0 * pot.excess1m(e)) - 1.0 / alpha;
    };
    // integrand decays like (W'''(1)/(6 alpha^3)) e^{-v}
    const double integral = integrate(f, 0.0, 40.0, 1e-13);
    return std::exp(alpha * integral);
}

// Well distance 1 - omega(y) for y > 0, solved in v = -log(1 - s) space so
// the result keeps full relative precision even when omega(y) rounds to 1.
inline double layer_well_distance(const Potential& pot, double y) {
    if (!(y > 0.0)) throw std::domain_error("layer_well_distance: y > 0");
    auto phi = [&](double v) {
        const double e = std::exp(-v);
        return e / std::sqrt(2.0 * pot.excess1m(e));
    };
    // Lambda(v) := lambda(1 - e^{-v}) is monotone with Lambda' = phi ~ 1/alpha
    const double alpha = pot.alpha();
    double v = std::max(alpha * y, 1e-8);
    for (int it = 0; it < 100; ++it) {
        const double g = integrate(phi, 0.0, v, 1e-14) - y;
        if (std::abs(g) < 1e-13) return std::exp(-v);
        v -= g / phi(v);
        if (!(v > 0.0)) v = 1e-8;
    }
    throw NumericalError("layer_well_distance: no convergence");
}

// Tabulated heteroclinic layer omega with derivatives through order 4 and the
// Lemma-style exponential tail beyond the table.
struct LayerTable {
    double Y = 0.0;
    double step = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    Potential pot = Potential::quartic();
    // node i sits at y = -Y + i*step
    std::vector<double> om, om1, om2, om3, om4, om5;

    std::size_t size() const { return om.size(); }
    double y_at(std::size_t i) const { return -Y + static_cast<double>(i) * step; }

    // omega^{(k)}(y), k = 0..4. Table (cubic Hermite) inside |y| <= Y-2,
    // analytic tail beyond |y| = Y-1, linear blend on the unit in between.
    double eval(double y, int k) const {
        const double ay = std::abs(y);
        if (ay <= Y - 2.0) return interp(y, k);
        if (ay >= Y - 1.0) return tail(y, k);
        const double w = ay - (Y - 2.0);
        return (1.0 - w) * interp(y, k) + w * tail(y, k);
    }

    double tail(double y, int k) const {
        // omega ~ sign(y) (1 - beta e^{-alpha |y|}); derivatives alternate sign
        const double e = beta * std::exp(-alpha * std::abs(y));
        const double v = (k == 0) ? 1.0 - e
                                  : (k % 2 == 1 ? 1.0 : -1.0) * std::pow(alpha, k) * e;
        if (y >= 0.0) return v;
        return (k % 2 == 0 ? -v : v);  // omega^{(k)} is odd for even k, even for odd k
    }

    double interp(double y, int k) const {
        const double x0 = -Y;
        switch (k) {
            case 0: return hermite_eval(om, om1, x0, step, y);
            case 1: return hermite_eval(om1, om2, x0, step, y);
            case 2: return hermite_eval(om2, om3, x0, step, y);
            case 3: return hermite_eval(om3, om4, x0, step, y);
            case 4: return hermite_eval(om4, om5, x0, step, y);
            default: throw std::invalid_argument("LayerTable::eval: k must be 0..4");
        }
    }
};

// Build the layer table by root-finding lambda(s) = y node by node. Marching
// in v = -log(1-s) keeps every increment of lambda a short smooth integral;
// an 8-point Gauss panel per Newton step is exact to machine precision.
inline LayerTable build_layer(const Potential& pot, double Y = 25.0, double step = 1e-3) {
    if (!(Y > 0.0) || !(step > 0.0)) throw std::invalid_argument("build_layer: Y, step > 0");
    if (pot.max_order() < 3)
        throw InvalidPotentialError("build_layer: potential must support order-3 derivatives");

    LayerTable t;
    t.Y = Y;
    t.step = step;
    t.alpha = pot.alpha();
    t.beta = beta_constant(pot);
    t.pot = pot;

    const auto mpos = static_cast<std::size_t>(std::llround(Y / step));
    auto phi = [&](double v) {
        const double e = std::exp(-v);
        return e / std::sqrt(2.0 * pot.excess1m(e));
    };

    std::vector<double> spos(mpos + 1);
    spos[0] = 0.0;
    double v_prev = 0.0;
    for (std::size_t k = 1; k <= mpos; ++k) {
        // solve  int_{v_prev}^{v} phi = step  for v
        double v = v_prev + step / phi(v_prev);
        bool ok = false;
        double lo = v_prev, hi = v_prev + 8.0 * step / phi(v_prev) + 1.0;
        for (int it = 0; it < 60; ++it) {
            const double g = gauss8(phi, v_prev, v) - step;
            if (std::abs(g) < 1e-14) {
                ok = true;
                break;
            }
            (g > 0 ? hi : lo) = v;
            double vn = v - g / phi(v);
            if (!(vn > lo && vn < hi)) vn = 0.5 * (lo + hi);
            v = vn;
        }
        if (!ok)
            throw NumericalError("build_layer: root-find failed at node " + std::to_string(k));
        const double s = 1.0 - std::exp(-v);
        if (!(s < 1.0))
            throw NumericalError("build_layer: s reached 1 at node " + std::to_string(k) +
                                 " (Y too large for double precision)");
        spos[k] = s;
        v_prev = v;
    }

    const std::size_t m = 2 * mpos + 1;
    t.om.resize(m);
    t.om1.resize(m);
    t.om2.resize(m);
    t.om3.resize(m);
    t.om4.resize(m);
    t.om5.resize(m);
    for (std::size_t k = 0; k <= mpos; ++k) {
        const double s = spos[k];
        const double w1 = pot.eval(s, 1), w2 = pot.eval(s, 2), w3 = pot.eval(s, 3);
        const double w4 = pot.max_order() >= 4 ? pot.eval(s, 4) : 0.0;
        const double d1 = std::sqrt(2.0 * pot.excess(s));
        const double d2 = w1;
        const double d3 = w2 * d1;
        const double d4 = w3 * d1 * d1 + w2 * w1;
        const double d5 = d1 * (w4 * d1 * d1 + 3.0 * w3 * w1 + w2 * w2);
        const std::size_t ip = mpos + k, in = mpos - k;
        t.om[ip] = s;
        t.om1[ip] = d1;
        t.om2[ip] = d2;
        t.om3[ip] = d3;
        t.om4[ip] = d4;
        t.om5[ip] = d5;
        // odd reflection: omega(-y) = -omega(y)
        t.om[in] = -s;
        t.om1[in] = d1;
        t.om2[in] = -d2;
        t.om3[in] = d3;
        t.om4[in] = -d4;
        t.om5[in] = d5;
    }
    return t;
}

}  // namespace wch

#endif
