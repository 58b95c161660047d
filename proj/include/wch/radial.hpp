#ifndef WCH_RADIAL_HPP
#define WCH_RADIAL_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "wch/errors.hpp"
#include "wch/numerics.hpp"

namespace wch {

// Uniform radial grid r_i = (i+1) dx, i = 0..n-1, covering (0, R]. There is
// no node at r = 0; radial symmetry (u_r(0) = u_rrr(0) = 0) enters through
// even ghost extension u(-r) = u(r).
struct RadialGrid {
    double dx = 0.0;
    std::size_t n = 0;

    RadialGrid() = default;
    RadialGrid(double dx_, double R) : dx(dx_) {
        if (!(dx > 0.0) || !(R > dx)) throw std::invalid_argument("RadialGrid: bad dx/R");
        n = static_cast<std::size_t>(std::llround(R / dx));
    }
    double r(std::size_t i) const { return dx * static_cast<double>(i + 1); }
    double R() const { return dx * static_cast<double>(n); }
    bool operator==(const RadialGrid& o) const { return dx == o.dx && n == o.n; }
};

struct RadialField {
    RadialGrid grid;
    std::vector<double> v;

    RadialField() = default;
    explicit RadialField(const RadialGrid& g) : grid(g), v(g.n, 0.0) {}
    RadialField(const RadialGrid& g, std::vector<double> vals)
        : grid(g), v(std::move(vals)) {}

    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

// Five-point derivative operators of orders 1..4. Interior stencils are
// centered (orders 1,2 are 4th-order accurate, orders 3,4 are 2nd-order);
// the two inner rows mirror across r = 0 skipping the absent r = 0 node, the
// two outer rows go one-sided. All rows are exact on polynomials through
// degree 4.
class Stencils {
public:
    explicit Stencils(double dx) : dx_(dx) {
        // interior centered weights at offsets {-2,-1,0,1,2} * dx
        const std::vector<double> xs = {-2 * dx, -dx, 0.0, dx, 2 * dx};
        for (int m = 1; m <= 4; ++m) center_[m - 1] = fd_weights(0.0, xs, m);
        // inner rows: stencil points in r, mirrored values supplied by caller
        // row 0 (r = dx): points {-2dx,-dx,dx,2dx,3dx} -> offsets {-3,-2,0,1,2}
        const std::vector<double> x0 = {-3 * dx, -2 * dx, 0.0, dx, 2 * dx};
        // row 1 (r = 2dx): points {-dx,dx,2dx,3dx,4dx} -> offsets {-3,-1,0,1,2}
        const std::vector<double> x1 = {-3 * dx, -dx, 0.0, dx, 2 * dx};
        // outer rows, one-sided
        const std::vector<double> xm2 = {-3 * dx, -2 * dx, -dx, 0.0, dx};
        const std::vector<double> xm1 = {-4 * dx, -3 * dx, -2 * dx, -dx, 0.0};
        for (int m = 1; m <= 4; ++m) {
            inner0_[m - 1] = fd_weights(0.0, x0, m);
            inner1_[m - 1] = fd_weights(0.0, x1, m);
            outer1_[m - 1] = fd_weights(0.0, xm2, m);
            outer0_[m - 1] = fd_weights(0.0, xm1, m);
        }
    }

    double dx() const { return dx_; }

    // m-th derivative at node i of the sampled field u (size nn). Working on
    // u_j - u_i annihilates constants exactly: the raw weight sums carry
    // roundoff that 1/dx^m would otherwise amplify to ~1e-8.
    double deriv(const std::vector<double>& u, std::size_t i, int m) const {
        const std::size_t nn = u.size();
        const double c = u[i];
        const auto& wc = center_[m - 1];
        if (i >= 2 && i + 2 < nn)
            return wc[0] * (u[i - 2] - c) + wc[1] * (u[i - 1] - c) +
                   wc[3] * (u[i + 1] - c) + wc[4] * (u[i + 2] - c);
        if (i == 0) {
            const auto& w = inner0_[m - 1];
            // values at {-2dx,-dx,dx,2dx,3dx} = {u1,u0,u0,u1,u2} by even mirror
            return (w[0] + w[3]) * (u[1] - c) + w[4] * (u[2] - c);
        }
        if (i == 1) {
            const auto& w = inner1_[m - 1];
            // values at {-dx,dx,2dx,3dx,4dx} = {u0,u0,u1,u2,u3}
            return (w[0] + w[1]) * (u[0] - c) + w[3] * (u[2] - c) + w[4] * (u[3] - c);
        }
        if (i + 2 == nn) {
            const auto& w = outer1_[m - 1];
            return w[0] * (u[i - 3] - c) + w[1] * (u[i - 2] - c) + w[2] * (u[i - 1] - c) +
                   w[4] * (u[i + 1] - c);
        }
        const auto& w = outer0_[m - 1];
        return w[0] * (u[i - 4] - c) + w[1] * (u[i - 3] - c) + w[2] * (u[i - 2] - c) +
               w[3] * (u[i - 1] - c);
    }

    const std::vector<double>& center(int m) const { return center_[m - 1]; }

private:
    double dx_;
    std::array<std::vector<double>, 4> center_, inner0_, inner1_, outer0_, outer1_;
};

// Derivative field of order m (same grid).
inline RadialField derivative(const RadialField& f, int m) {
    if (m < 1 || m > 4) throw std::invalid_argument("derivative: order 1..4");
    if (f.size() < 6) throw CoverageError("derivative: field too short");
    Stencils st(f.grid.dx);
    RadialField out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = st.deriv(f.v, i, m);
    return out;
}

}  // namespace wch

#endif
