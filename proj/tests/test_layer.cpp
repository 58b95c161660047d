#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "wch/correction.hpp"
#include "wch/layer.hpp"

using namespace wch;

namespace {
const Potential& quartic() {
    static Potential p = Potential::quartic();
    return p;
}
const LayerTable& qlayer() {
    static LayerTable t = build_layer(quartic());
    return t;
}
}  // namespace

TEST_CASE("lambda closed form for the quartic well") {
    // oracle: lambda(s) = sqrt(2) artanh(s)
    const double s = 0.5;
    const double oracle = std::sqrt(2.0) * std::atanh(s);
    CHECK(lambda_of_s(quartic(), s) == Catch::Approx(oracle).margin(1e-10));
    CHECK(lambda_of_s(quartic(), -s) == Catch::Approx(-oracle).margin(1e-10));
    CHECK(lambda_of_s(quartic(), 0.0) == 0.0);
    CHECK(lambda_of_s(quartic(), 0.999) ==
          Catch::Approx(std::sqrt(2.0) * std::atanh(0.999)).margin(1e-9));
    CHECK_THROWS_AS(lambda_of_s(quartic(), 1.0), std::domain_error);
}

TEST_CASE("layer profile matches tanh(y/sqrt 2)") {
    const LayerTable& t = qlayer();
    double sup = 0.0;
    for (double y = -10.0; y <= 10.0; y += 0.0137)
        sup = std::max(sup, std::abs(t.eval(y, 0) - std::tanh(y / std::sqrt(2.0))));
    CHECK(sup < 1e-8);
    CHECK(t.eval(0.0, 0) == 0.0);
    CHECK(t.eval(0.0, 1) == Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("beta constant") {
    // quartic: integrand reduces to (1/sqrt2)/(1+s), beta = 2 exactly
    CHECK(beta_constant(quartic()) == Catch::Approx(2.0).epsilon(1e-6));
    const LayerTable& t = qlayer();
    const double a = t.alpha, b = t.beta;
    // tail limits of the decay lemma at y = 15
    const double y = 15.0;
    CHECK((1.0 - t.eval(y, 0)) * std::exp(a * y) == Catch::Approx(b).margin(1e-4));
    CHECK(t.eval(y, 1) * std::exp(a * y) == Catch::Approx(a * b).margin(1e-4));
}

TEST_CASE("second-order tail refinement has a limit") {
    // (omega - 1 + beta e^{-alpha y}) / (beta^2 e^{-2 alpha y}) -> W'''(1)/(6 W''(1)).
    // The numerator sits below one ulp of omega by y = 14, so it is formed
    // from the well distance solved in v-space, not from the rounded profile.
    const LayerTable& t = qlayer();
    const double a = t.alpha, b = t.beta;
    double vals[3];
    int k = 0;
    for (double y : {12.0, 14.0, 16.0}) {
        const double e = layer_well_distance(quartic(), y);
        const double num = b * std::exp(-a * y) - e;
        vals[k++] = num / (b * b * std::exp(-2.0 * a * y));
    }
    CHECK(std::abs(vals[1] - vals[0]) < 1e-2);
    CHECK(std::abs(vals[2] - vals[1]) < 1e-2);
    const double limit = quartic().eval(1.0, 3) / (6.0 * quartic().eval(1.0, 2));
    CHECK(vals[2] == Catch::Approx(limit).margin(1e-2));
}

TEST_CASE("table invariants") {
    const LayerTable& t = qlayer();
    for (std::size_t i = 0; i < t.size(); i += 7) {
        CHECK(t.om1[i] > 0.0);                      // monotone
        CHECK(std::abs(t.om[i]) < 1.0);             // range
        const std::size_t j = t.size() - 1 - i;     // oddness
        CHECK(std::abs(t.om[i] + t.om[j]) < 1e-10);
        CHECK(std::abs(t.om2[i] - quartic().eval(t.om[i], 1)) < 1e-8);  // ODE residual
        // first integral: (omega')^2/2 = W(omega) - W(1)
        CHECK(std::abs(0.5 * t.om1[i] * t.om1[i] - quartic().excess(t.om[i])) < 1e-10);
    }
}

TEST_CASE("lambda(omega(y)) = y round trip") {
    // Rounding omega(y) to a double floors the recoverable accuracy of y at
    // ulp(1)/(2 omega'(y)); that conditioning term dominates 1e-8 beyond
    // |y| ~ 14 for the quartic well, so the tolerance carries it explicitly.
    const LayerTable& t = qlayer();
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> dist(-t.Y + 1.0, t.Y - 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double y = dist(rng);
        const double s = t.eval(y, 0);
        const double floor = 0.5 * 2.3e-16 / t.eval(y, 1);
        CHECK(lambda_of_s(quartic(), s) ==
              Catch::Approx(y).margin(1e-8 + 4.0 * floor));
    }
}

TEST_CASE("cosine layer obeys its own ODE") {
    const Potential cosw = Potential::cosine_rescaled();
    const LayerTable t = build_layer(cosw, 12.0, 1e-3);
    for (std::size_t i = 0; i < t.size(); i += 11) {
        CHECK(std::abs(t.om2[i] - cosw.eval(t.om[i], 1)) < 1e-8);
        CHECK(t.om1[i] > 0.0);
    }
    // sine-Gordon profile: omega(y) = (4/pi) atan(tanh(y/2)) ... check ODE
    // residual only; closed form checked via the round trip
    CHECK(lambda_of_s(cosw, t.eval(1.0, 0)) == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("bad arguments") {
    CHECK_THROWS_AS(build_layer(quartic(), -1.0, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(build_layer(quartic(), 25.0, 0.0), std::invalid_argument);
}
