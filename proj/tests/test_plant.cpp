#include "catch_amalgamated.hpp"

#include "scconv/plant.hpp"
#include "scconv/simulator.hpp"

#include <cmath>
#include <random>

using namespace scconv;
using Catch::Approx;

namespace {

// Hand-expanded vector field, kept separate from the library implementation.
PlantRates reference_rates(const PlantState& x, const ControlInput& u, double il, const ConverterParams& p) {
    return {(-p.R1 * x.x1 + x.x5 - x.x2 * u.u1) / p.L1,
            (-p.G * x.x2 + x.x1 * u.u1 - x.x3 * u.u2) / p.C1,
            (-p.R2 * x.x3 - x.x4 + x.x2 * u.u2) / p.L2,
            (x.x3 - il) / p.C2,
            (-p.Gsc * x.x5 - x.x1) / p.Csc};
}

PlantState random_state(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> cur(-40, 40), v(1, 200);
    return {cur(rng), v(rng), cur(rng), v(rng), v(rng)};
}

} // namespace

TEST_CASE("plant rates at a nominal operating point", "[plant]") {
    const auto p = ConverterParams::simulation();
    const auto d = derivative({0, 100, 0, 50, 48}, {0.5, 0.5}, 5.0, p);
    CHECK(d.x1 == Approx(-200.0));
    CHECK(d.x2 == Approx(-0.005 / 8.8e-3));
    CHECK(d.x2 == Approx(-0.568).epsilon(1e-3));
    CHECK(d.x3 == Approx(0.0).margin(1e-12));
    CHECK(d.x4 == Approx(-2272.727).epsilon(1e-6));
    CHECK(d.x5 == Approx(-1.536e-4));
}

TEST_CASE("plant rates match the hand-expanded field on random states", "[plant]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> duty(0, 1), load(-20, 20);
    for (const auto& p : {ConverterParams::simulation(), ConverterParams::experimental()}) {
        for (int k = 0; k < 500; ++k) {
            const auto x = random_state(rng);
            const ControlInput u{duty(rng), duty(rng)};
            const double il = load(rng);
            const auto a = derivative(x, u, il, p).as_array();
            const auto b = reference_rates(x, u, il, p).as_array();
            for (int i = 0; i < 5; ++i) CHECK(a[i] == Approx(b[i]).epsilon(1e-12).margin(1e-9));
        }
    }
}

TEST_CASE("origin with zero load is at rest", "[plant]") {
    const auto d = derivative({}, {0.3, 0.7}, 0.0, ConverterParams::simulation());
    for (double v : d.as_array()) CHECK(v == 0.0);
}

TEST_CASE("port-Hamiltonian matrices have the expected structure", "[plant]") {
    const auto p = ConverterParams::simulation();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> duty(0, 1);
    for (int k = 0; k < 100; ++k) {
        const auto f = ph_matrices({duty(rng), duty(rng)}, p);
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                CHECK(f.J[i][j] == -f.J[j][i]);
                if (i != j) {
                    CHECK(f.R[i][j] == 0.0);
                    CHECK(f.Q[i][j] == 0.0);
                }
            }
            CHECK(f.R[i][i] >= 0.0);
        }
    }
    const auto f = ph_matrices({0.2, 0.4}, p);
    CHECK(f.R[0][0] == p.R1);
    CHECK(f.R[1][1] == p.G);
    CHECK(f.R[2][2] == p.R2);
    CHECK(f.R[3][3] == 0.0);
    CHECK(f.R[4][4] == p.Gsc);
    CHECK(f.Q[0][0] == p.L1);
    CHECK(f.Q[4][4] == p.Csc);
    CHECK(f.g[3] == -1.0);
}

TEST_CASE("zero duties leave only the duty-independent couplings in J", "[plant]") {
    const auto f = ph_matrices({0, 0}, ConverterParams::simulation());
    Matrix5 expected{};
    expected[0][4] = 1;
    expected[4][0] = -1;
    expected[2][3] = -1;
    expected[3][2] = 1;
    CHECK(f.J == expected);
}

TEST_CASE("port-Hamiltonian form reproduces the vector field", "[plant]") {
    const auto p = ConverterParams::simulation();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> duty(0, 1), load(-20, 20);
    for (int k = 0; k < 1000; ++k) {
        const auto x = random_state(rng);
        const ControlInput u{duty(rng), duty(rng)};
        const double il = load(rng);
        const auto a = derivative(x, u, il, p).as_array();
        const auto b = derivative_ph(x, u, il, p).as_array();
        for (int i = 0; i < 5; ++i) CHECK(a[i] == Approx(b[i]).epsilon(1e-12).margin(1e-9));
    }
}

TEST_CASE("stored energy of the unit state", "[plant]") {
    const auto p = ConverterParams::simulation();
    const double expected = 0.5 * (p.L1 + p.C1 + p.L2 + p.C2 + p.Csc);
    CHECK(stored_energy({1, 1, 1, 1, 1}, p) == Approx(expected));
    CHECK(stored_energy({1, 1, 1, 1, 1}, p) == Approx(31.2655).epsilon(1e-6));
}

TEST_CASE("power balance holds pointwise", "[plant][property]") {
    const auto p = ConverterParams::simulation();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> duty(0, 1), load(-20, 20);
    for (int k = 0; k < 1000; ++k) {
        const auto x = random_state(rng);
        const ControlInput u{duty(rng), duty(rng)};
        const double il = load(rng);
        const double scale = power_balance_scale(x, u, il, p);
        CHECK(std::abs(power_balance_residual(x, u, il, p)) <= 1e-9 * scale);
    }
}

TEST_CASE("energy accounting over an open-loop trajectory", "[plant][property]") {
    // H(T) - H(0) against the integral of -x^T R x - x4 IL by Simpson's rule.
    const auto p = ConverterParams::simulation();
    const ControlInput u{0.6, 0.4};
    const double il = 3.0;
    const double h = 1e-5;
    const int n = 2000; // even
    std::vector<PlantState> xs{{2.0, 90.0, 1.0, 40.0, 48.0}};
    for (int k = 0; k < n; ++k)
        xs.push_back(integrate_open_loop(xs.back(), u, il, p, ModelKind::averaged, 10e3, h, h));
    auto supply = [&](const PlantState& x) { return -dissipated_power(x, p) - x.x4 * il; };
    double integral = supply(xs.front()) + supply(xs.back());
    for (int k = 1; k < n; ++k) integral += (k % 2 ? 4.0 : 2.0) * supply(xs[k]);
    integral *= h / 3.0;
    const double dh = stored_energy(xs.back(), p) - stored_energy(xs.front(), p);
    CHECK(dh == Approx(integral).epsilon(1e-6));
}

TEST_CASE("no forced equilibrium for non-negative load", "[plant][property]") {
    const auto p = ConverterParams::simulation();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> v(1, 300), load(0, 100);
    for (int k = 0; k < 2000; ++k) CHECK_FALSE(equilibrium_feasibility(v(rng), v(rng), load(rng), p).feasible);
    CHECK_FALSE(equilibrium_feasibility(100, 50, 0.0, p).feasible);
}

TEST_CASE("a charging load admits an equilibrium that the field confirms", "[plant]") {
    const auto p = ConverterParams::simulation();
    const double x2s = 100, x4s = 50, il = -5;
    const auto eq = equilibrium_feasibility(x2s, x4s, il, p);
    REQUIRE(eq.feasible);
    REQUIRE(eq.x5star_squared > 0);
    const double x5 = std::sqrt(eq.x5star_squared);
    const double x1 = -p.Gsc * x5;
    const PlantState x{x1, x2s, il, x4s, x5};
    const ControlInput u{x5 * (1 + p.R1 * p.Gsc) / x2s, (p.R2 * il + x4s) / x2s};
    const auto d = derivative(x, u, il, p).as_array();
    for (double v : d) CHECK(v == Approx(0.0).margin(1e-9));
    CHECK(eq.x3star == il);
}

TEST_CASE("parameter presets", "[plant]") {
    CHECK(ConverterParams::simulation().valid());
    CHECK(ConverterParams::experimental().valid());
    const auto e = ConverterParams::experimental();
    CHECK(e.L1 == 8.78e-3);
    CHECK(e.C2 == 7.6e-3);
    CHECK(e.R2 == 1.69);
    ConverterParams bad;
    bad.C1 = 0;
    CHECK_FALSE(bad.valid());
}
