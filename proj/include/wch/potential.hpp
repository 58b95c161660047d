#ifndef WCH_POTENTIAL_HPP
#define WCH_POTENTIAL_HPP

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wch/errors.hpp"
#include "wch/numerics.hpp"

namespace wch {

enum class PotentialKind { Quartic, CosineRescaled, UserTabulated };

// Double-well potential W with two non-degenerate minima at s = +1 and -1,
// even and normalized to W(+-1) = 0. Built-in kinds have closed forms for
// derivatives through order 4; tabulated wells are cubic splines and stop at
// order 2.
class Potential {
public:
    static Potential quartic() { return Potential(PotentialKind::Quartic); }

    // cos(s) rescaled so the minima sit exactly at +-1 and W(+-1) = 0:
    //   W(s) = (1 + cos(pi s)) / pi^2,  W''(1) = 1.
    // The affine factors (1/pi^2 in value, pi in argument) are explicit here.
    static Potential cosine_rescaled() { return Potential(PotentialKind::CosineRescaled); }

    static Potential tabulated(std::vector<double> s, std::vector<double> w) {
        Potential p(PotentialKind::UserTabulated);
        p.build_spline(std::move(s), std::move(w));
        p.validate_tabulated();
        return p;
    }

    PotentialKind kind() const { return kind_; }
    int max_order() const { return kind_ == PotentialKind::UserTabulated ? 2 : 4; }

    // d^order W / ds^order at s, order in 0..4.
    double eval(double s, int order) const {
        if (order < 0 || order > 4)
            throw std::invalid_argument("Potential::eval: order must be 0..4");
        switch (kind_) {
            case PotentialKind::Quartic:
                switch (order) {
                    // (1-s)(1+s) stays exact near the wells where 1 - s*s cancels
                    case 0: return 0.25 * sq((1.0 - s) * (1.0 + s));
                    case 1: return s * s * s - s;
                    case 2: return 3.0 * s * s - 1.0;
                    case 3: return 6.0 * s;
                    default: return 6.0;
                }
            case PotentialKind::CosineRescaled:
                switch (order) {
                    case 0: return (1.0 + std::cos(kPi * s)) / (kPi * kPi);
                    case 1: return -std::sin(kPi * s) / kPi;
                    case 2: return -std::cos(kPi * s);
                    case 3: return kPi * std::sin(kPi * s);
                    default: return kPi * kPi * std::cos(kPi * s);
                }
            default:
                if (order > 2)
                    throw std::invalid_argument(
                        "tabulated potential: spline derivatives stop at order 2");
                return spline_eval(s, order);
        }
    }

    // W(s) - W(1), evaluated in a form that stays accurate near the wells.
    double excess(double s) const {
        switch (kind_) {
            case PotentialKind::Quartic:
                return 0.25 * sq((1.0 - s) * (1.0 + s));
            case PotentialKind::CosineRescaled: {
                // 1 + cos(pi s) = 2 sin^2(pi (1-|s|)/2), no cancellation at the wells
                const double t = std::sin(0.5 * kPi * (1.0 - std::abs(s)));
                return 2.0 * t * t / (kPi * kPi);
            }
            default:
                return spline_eval(s, 0) - w_at_one_;
        }
    }

    // W(1-e) - W(1) as a function of the well distance e. Forming s = 1-e and
    // calling excess(s) would round e away; the built-in kinds evaluate from e
    // directly and stay accurate down to e ~ 1e-300.
    double excess1m(double e) const {
        switch (kind_) {
            case PotentialKind::Quartic:
                return 0.25 * sq(e * (2.0 - e));
            case PotentialKind::CosineRescaled: {
                const double t = std::sin(0.5 * kPi * e);
                return 2.0 * t * t / (kPi * kPi);
            }
            default:
                return spline_eval(1.0 - e, 0) - w_at_one_;
        }
    }

    // alpha = sqrt(W''(1)). Tabulated wells cannot certify a curvature below
    // the spline resolution, so they use a small positive floor.
    double alpha() const {
        const double w2 = eval(1.0, 2);
        const double floor = (kind_ == PotentialKind::UserTabulated) ? 1e-3 : 0.0;
        if (!(w2 > floor))
            throw InvalidPotentialError("alpha: W''(1) must be positive (degenerate well)");
        return std::sqrt(w2);
    }

private:
    explicit Potential(PotentialKind k) : kind_(k) {}

    void build_spline(std::vector<double> s, std::vector<double> w) {
        if (s.size() != w.size() || s.size() < 4)
            throw std::invalid_argument("tabulated potential: need >= 4 samples");
        xs_ = std::move(s);
        ys_ = std::move(w);
        const std::size_t n = xs_.size();
        // natural cubic spline second derivatives
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
        b[0] = b[n - 1] = 1.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double hl = xs_[i] - xs_[i - 1], hr = xs_[i + 1] - xs_[i];
            a[i] = hl / 6.0;
            b[i] = (hl + hr) / 3.0;
            c[i] = hr / 6.0;
            r[i] = (ys_[i + 1] - ys_[i]) / hr - (ys_[i] - ys_[i - 1]) / hl;
        }
        TriLU lu(a, b, c);
        m2_ = lu.solve(r);
        w_at_one_ = spline_eval(1.0, 0);
    }

    double spline_eval(double s, int order) const {
        if (s < xs_.front() || s > xs_.back())
            throw std::domain_error("tabulated potential: s outside table");
        std::size_t lo = 0, hi = xs_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (xs_[mid] <= s ? lo : hi) = mid;
        }
        const double h = xs_[hi] - xs_[lo];
        const double A = (xs_[hi] - s) / h, B = (s - xs_[lo]) / h;
        switch (order) {
            case 0:
                return A * ys_[lo] + B * ys_[hi] +
                       ((A * A * A - A) * m2_[lo] + (B * B * B - B) * m2_[hi]) * h * h / 6.0;
            case 1:
                return (ys_[hi] - ys_[lo]) / h -
                       (3.0 * A * A - 1.0) / 6.0 * h * m2_[lo] +
                       (3.0 * B * B - 1.0) / 6.0 * h * m2_[hi];
            default:
                return A * m2_[lo] + B * m2_[hi];
        }
    }

    void validate_tabulated() const {
        // double-well assumptions, at spline accuracy
        const double span = std::min(std::abs(xs_.front()), xs_.back());
        if (span < 1.0)
            throw InvalidPotentialError("tabulated potential: table must cover [-1,1]");
        for (double s = 0.0; s <= span; s += 0.01) {
            if (std::abs(spline_eval(s, 0) - spline_eval(-s, 0)) > 1e-8)
                throw InvalidPotentialError("tabulated potential: W is not even");
        }
        if (std::abs(spline_eval(1.0, 1)) > 1e-6 || std::abs(spline_eval(-1.0, 1)) > 1e-6)
            throw InvalidPotentialError("tabulated potential: W'(+-1) must vanish");
        for (double s = -0.999; s < 0.999; s += 1e-3) {
            if (!(spline_eval(s, 0) > w_at_one_))
                throw InvalidPotentialError("tabulated potential: no interior excess");
        }
    }

    PotentialKind kind_;
    std::vector<double> xs_, ys_, m2_;
    double w_at_one_ = 0.0;
};

}  // namespace wch

#endif
