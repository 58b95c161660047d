#ifndef WCH_CUTOFF_HPP
#define WCH_CUTOFF_HPP

#include <cmath>
#include <stdexcept>

namespace wch {

// Smooth cut-off around the origin: chi = 0 for r <= delta0/2, chi = 1 for
// r >= delta0, C-infinity in between (standard exponential partition of
// unity, so every derivative vanishes at both junctions).
class CutOff {
public:
    explicit CutOff(double delta0 = 0.5) : delta0_(delta0) {
        if (!(delta0 > 0.0)) throw std::invalid_argument("CutOff: delta0 > 0");
    }

    double delta0() const { return delta0_; }

    double value(double r) const {
        const double x = (r - 0.5 * delta0_) / (0.5 * delta0_);
        return smoothstep(x);
    }

    // d chi / dr (closed form; used by the projection denominators)
    double deriv(double r) const {
        const double x = (r - 0.5 * delta0_) / (0.5 * delta0_);
        if (x <= 0.0 || x >= 1.0) return 0.0;
        const double ba = bump(x), bb = bump(1.0 - x);
        const double da = ba / (x * x), db = -bb / sq_(1.0 - x);
        // d/dx [ ba/(ba+bb) ]
        const double s = ba + bb;
        return (da * bb - ba * db) / (s * s) / (0.5 * delta0_);
    }

private:
    static double bump(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
    static double sq_(double x) { return x * x; }
    static double smoothstep(double x) {
        if (x <= 0.0) return 0.0;
        if (x >= 1.0) return 1.0;
        const double a = bump(x);
        return a / (a + bump(1.0 - x));
    }

    double delta0_;
};

}  // namespace wch

#endif
