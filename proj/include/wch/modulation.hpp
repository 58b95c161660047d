#ifndef WCH_MODULATION_HPP
#define WCH_MODULATION_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "wch/geometry.hpp"

namespace wch {

// Interface bookkeeping: rho(t) = gamma_n(t) + h(t) with a small modulation h.
// h and h' default to zero; solvers install sampled functions. The stationary
// dimensions (n = 1, 3) have no Willmore radius and carry a fixed base radius
// instead.
struct ModulationState {
    int n = 4;
    double fixed_rho = 0.0;  // used when n is 1 or 3
    std::function<double(double)> h = [](double) { return 0.0; };
    std::function<double(double)> hp = [](double) { return 0.0; };

    bool stationary() const { return n == 1 || n == 3; }
    double rho(double t) const {
        return (stationary() ? fixed_rho : gamma_n(n, t)) + h(t);
    }
    double rhop(double t) const {
        return (stationary() ? 0.0 : gamma_n_dot(n, t)) + hp(t);
    }
};

// sup |h| + sup (|t|/log|t|) |h'| over the given sample times.
inline double lambda_norm(const std::function<double(double)>& h,
                          const std::function<double(double)>& hp,
                          const std::vector<double>& ts) {
    double sh = 0.0, shp = 0.0;
    for (double t : ts) {
        sh = std::max(sh, std::abs(h(t)));
        const double at = std::abs(t);
        if (at > 1.0) shp = std::max(shp, at / std::log(at) * std::abs(hp(t)));
    }
    return sh + shp;
}

}  // namespace wch

#endif
