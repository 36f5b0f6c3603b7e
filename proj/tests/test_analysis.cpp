#include "catch_amalgamated.hpp"

#include "scconv/analysis.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace scconv;
using Catch::Approx;

namespace {

std::complex<double> eval_poly(const std::array<double, 4>& c, std::complex<double> s) {
    return ((c[0] * s + c[1]) * s + c[2]) * s + c[3];
}

/// Trajectory with every column sized n and a uniform time grid.
SimResult blank(std::size_t n, double period, double dt) {
    SimResult r;
    r.dt = dt;
    for (auto* c : {&r.t, &r.x1, &r.x2, &r.x3, &r.x4, &r.x5, &r.u1, &r.u2, &r.x3ref, &r.x1ref, &r.kappa5, &r.il,
                    &r.x2star, &r.x4star})
        c->assign(n, 0.0);
    r.sat1.assign(n, 0);
    r.sat2.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) r.t[i] = static_cast<double>(i) * period;
    return r;
}

Scenario fine(Scenario sc, double horizon) {
    sc.horizon = horizon;
    sc.sample_period = 5e-5;
    return sc;
}

} // namespace

TEST_CASE("x4 loop error matrix at the default gains", "[analysis]") {
    const auto p = ConverterParams::simulation();
    const auto A = sigma1_error_matrix({}, p).A;
    CHECK(A[0][0] == Approx(-1010));
    CHECK(A[1][0] == Approx(1 / 2.2e-3));
    CHECK(A[1][1] == Approx(-1 / 2.2e-3));
    CHECK(A[1][2] == Approx(-500 / 2.2e-3));
    CHECK(A[2][1] == 1.0);
    CHECK(A[0][1] == 0.0);
    CHECK(A[0][2] == 0.0);
}

TEST_CASE("error matrix eigenvalues", "[analysis]") {
    const auto p = ConverterParams::simulation();
    const auto c = characteristic_polynomial(sigma1_error_matrix({}, p).A);
    // Block-triangular: (s + 1010)(s^2 + s/C2 + 500/C2).
    const double b = 1 / p.C2, k = 500 / p.C2;
    CHECK(c[0] == 1.0);
    CHECK(c[1] == Approx(1010 + b));
    CHECK(c[2] == Approx(1010 * b + k));
    CHECK(c[3] == Approx(1010 * k));
    const double re = -b / 2, im = std::sqrt(k - b * b / 4);
    CHECK(re == Approx(-227.27).epsilon(1e-4));
    CHECK(im == Approx(419.07).epsilon(1e-3));
    const double scale = std::abs(c[3]);
    CHECK(std::abs(eval_poly(c, {-1010, 0})) < 1e-9 * scale);
    CHECK(std::abs(eval_poly(c, {re, im})) < 1e-9 * scale);
    CHECK(std::abs(eval_poly(c, {re, -im})) < 1e-9 * scale);
}

TEST_CASE("characteristic polynomial of triangular matrices", "[analysis][property]") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int n = 0; n < 200; ++n) {
        const double a = u(rng), d = u(rng), f = u(rng);
        const Matrix3 A{{{a, u(rng), u(rng)}, {0, d, u(rng)}, {0, 0, f}}};
        const auto c = characteristic_polynomial(A);
        CHECK(c[1] == Approx(-(a + d + f)).margin(1e-12));
        CHECK(c[2] == Approx(a * d + a * f + d * f).margin(1e-12));
        CHECK(c[3] == Approx(-a * d * f).margin(1e-12));
        CHECK(routh_hurwitz({c.begin(), c.end()}) == (a < 0 && d < 0 && f < 0));
    }
}

TEST_CASE("Routh array on known polynomials", "[analysis]") {
    CHECK(routh_hurwitz({1, 6, 11, 6}));
    CHECK(routh_hurwitz({1, 4, 6, 4, 1}));
    CHECK(routh_hurwitz({2, 3}));
    CHECK_FALSE(routh_hurwitz({1, 1, 1, 10}));
    CHECK_FALSE(routh_hurwitz({1, 0, -1}));
    CHECK_FALSE(routh_hurwitz({1, 1, 1, 1, 1}));
    CHECK_FALSE(routh_hurwitz({1, 0, 1}));
    CHECK_FALSE(routh_hurwitz({1, 2, 3, 6}));
    CHECK_FALSE(routh_hurwitz({}));
}

TEST_CASE("Hurwitz certificate of the x4 loop", "[analysis][property]") {
    const auto p = ConverterParams::simulation();
    CHECK(hurwitz(sigma1_error_matrix({}, p)));
    CHECK(hurwitz(sigma1_error_matrix({1, 0.5, 10}, ConverterParams::experimental())));
    CHECK_FALSE(hurwitz(sigma1_error_matrix({10, 1, 0}, p)));
    // Gains that place every root at s = -1.
    ConverterParams q = p;
    q.R2 = 1e-3;
    const Sigma1Gains g{q.L2 - q.R2, 2 * q.C2, q.C2};
    const auto c = characteristic_polynomial(sigma1_error_matrix(g, q).A);
    CHECK(c[1] == Approx(3));
    CHECK(c[2] == Approx(3));
    CHECK(c[3] == Approx(1));
    CHECK(hurwitz(sigma1_error_matrix(g, q)));
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> e(-2, 4);
    for (int n = 0; n < 1000; ++n) {
        const Sigma1Gains r{std::pow(10, e(rng)), std::pow(10, e(rng)), std::pow(10, e(rng))};
        CHECK(hurwitz(sigma1_error_matrix(r, p)));
    }
}

TEST_CASE("slowest decay rate and transient window", "[analysis]") {
    const auto p = ConverterParams::simulation();
    const auto g = ControllerGains::simulation();
    CHECK(slowest_decay_rate(g, p) == Approx((p.R1 + 1) / p.L1));
    CHECK(default_transient_window(g, p) == Approx(10 * p.L1 / (p.R1 + 1)));
    auto slow = g;
    slow.sigma2.kappa4 = 100;
    slow.sigma1.kappa2 = 0.1;
    CHECK(slowest_decay_rate(slow, p) == Approx(0.5 * 0.1 / p.C2));
}

TEST_CASE("SPR real part", "[analysis]") {
    const auto p = ConverterParams::simulation();
    const double w0 = 1 / std::sqrt(p.L2 * p.C2);
    CHECK(w0 == Approx(213.2).epsilon(1e-3));
    CHECK(spr_real_part(p, w0) == Approx(1 / p.R2));
    CHECK(spr_real_part(p, w0) == Approx(10));
    for (double w : {1.0, 10.0, 1e3, 1e5}) {
        const std::complex<double> s(0, w);
        const auto h = s / (p.L2 * s * s + p.R2 * s + 1 / p.C2);
        CHECK(spr_real_part(p, w) == Approx(h.real()).epsilon(1e-12));
    }
    const auto grid = default_frequency_grid();
    CHECK(grid.size() == 400);
    CHECK(grid.front() == Approx(1));
    CHECK(grid.back() == Approx(1e6));
    const auto m = spr_margin(p);
    CHECK(m.min_real_part > 0);
    CHECK(m.argmin_omega == Approx(1e6));
    CHECK(spr_margin(p, {w0}).min_real_part == Approx(10));
    CHECK_THROWS_AS(spr_margin(p, {}), std::invalid_argument);
    CHECK_THROWS_AS(spr_margin(p, {0.0}), std::invalid_argument);
}

TEST_CASE("phi supremum on synthetic trajectories", "[analysis]") {
    const auto p = ConverterParams::simulation();
    auto r = blank(11, 0.1, 0.01);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r.x1[i] = r.x1ref[i] = 3.0;
        r.x3[i] = 5.0;
    }
    CHECK(phi_sup(r, 100, p, 0.0) == Approx(5.005));
    r.x3.assign(r.size(), 0.0);
    CHECK(phi_sup(r, 100, p, 0.0) == Approx(0.005));
    r.x3[2] = -8;
    CHECK(phi_sup(r, 100, p, 0.0) == Approx(8.005));
    CHECK(phi_sup(r, 100, p, 0.25) == Approx(0.005));
    CHECK(phi_sup(r, 100, p, 0.0, 0.15) == Approx(0.005));
    CHECK_THROWS_AS(phi_sup(r, 100, p, 2.0), std::invalid_argument);
}

TEST_CASE("ultimate bound", "[analysis]") {
    const auto p = ConverterParams::simulation();
    const Sigma2Gains g2;
    CHECK(ultimate_bound(5.005, 1.8, g2, p) == Approx(55.58).epsilon(1e-4));
    CHECK(ultimate_bound(0.0, 1.8, g2, p) == 0.0);
    CHECK(ultimate_bound(5, 3.6, g2, p) < ultimate_bound(5, 1.8, g2, p));
    CHECK_THROWS_AS(ultimate_bound(5, -1.0, g2, p), std::invalid_argument);
}

TEST_CASE("response metrics of a first-order step", "[analysis]") {
    const double tau = 0.01, dt = 1e-5;
    auto r = blank(100001, dt, dt);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double s = r.t[i] - 0.1;
        r.x4[i] = s < 0 ? 50 : 70 - 20 * std::exp(-s / tau);
    }
    const auto m = response_metrics(r, "x4", 70, 0.1);
    CHECK(m.settled);
    CHECK(m.settling_time_2pct == Approx(tau * std::log(20 / 1.4)).margin(2 * dt));
    CHECK(m.overshoot_pct == Approx(0).margin(1e-12));
    CHECK(m.steady_state_error == Approx(0).margin(1e-9));
    CHECK(std::isnan(m.ultimate_bound));
}

TEST_CASE("response metrics of an underdamped step", "[analysis]") {
    const double zeta = 0.3, wn = 200, dt = 1e-5;
    const double wd = wn * std::sqrt(1 - zeta * zeta);
    auto r = blank(60001, dt, dt);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double s = r.t[i] - 0.1;
        r.x2[i] = s < 0 ? 100
                        : 120 - 20 * std::exp(-zeta * wn * s)
                                    * (std::cos(wd * s) + zeta / std::sqrt(1 - zeta * zeta) * std::sin(wd * s));
    }
    const auto m = response_metrics(r, "x2", 120, 0.1);
    CHECK(m.overshoot_pct == Approx(100 * std::exp(-M_PI * zeta / std::sqrt(1 - zeta * zeta))).epsilon(1e-4));
    CHECK(m.settled);
    // The 2% band is 2.4 V; the decay envelope 20/sqrt(1 - zeta^2) exp(-zeta wn t) bounds the settling time.
    const double envelope = std::log(20 / std::sqrt(1 - zeta * zeta) / 2.4) / (zeta * wn);
    CHECK(m.settling_time_2pct <= envelope + dt);
    CHECK(m.settling_time_2pct > 0.5 * envelope);
}

TEST_CASE("response metrics flag a run that never settles", "[analysis]") {
    auto r = blank(1001, 1e-3, 1e-4);
    r.x4.assign(r.size(), 60);
    const auto m = response_metrics(r, "x4", 70, 0.1);
    CHECK_FALSE(m.settled);
    CHECK(m.settling_time_2pct == Approx(0.9));
    CHECK(m.steady_state_error == Approx(-10));
    CHECK_THROWS_AS(response_metrics(r, "x3", 70, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(response_metrics(r, "x4", 70, 5.0), std::invalid_argument);
}

TEST_CASE("sampled derivative is exact on quadratics and respects segments", "[analysis]") {
    std::vector<double> t, f;
    for (int i = 0; i <= 20; ++i) {
        t.push_back(0.1 * i);
        f.push_back(3 * t.back() * t.back() - t.back() + 2);
    }
    const auto d = sampled_derivative(t, f);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(d[i] == Approx(6 * t[i] - 1).margin(1e-9));

    std::vector<int> seg(t.size(), 0);
    for (std::size_t i = 10; i < t.size(); ++i) {
        seg[i] = 1;
        f[i] += 100;
    }
    seg[15] = 2;
    for (std::size_t i = 16; i < t.size(); ++i) seg[i] = 3;
    const auto ds = sampled_derivative(t, f, seg);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i == 15)
            CHECK(std::isnan(ds[i]));
        else
            CHECK(ds[i] == Approx(6 * t[i] - 1).margin(1e-9));
    }
}

TEST_CASE("log decay slope", "[analysis]") {
    std::vector<double> t, e;
    for (int i = 0; i < 100; ++i) {
        t.push_back(0.01 * i);
        e.push_back((i % 2 ? -1 : 1) * 4 * std::exp(-3 * t.back()));
    }
    CHECK(log_decay_slope(t, e, 0, 1) == Approx(-3));
    CHECK(log_decay_slope(t, e, 0.2, 0.5) == Approx(-3));
    CHECK_THROWS_AS(log_decay_slope(t, e, 5, 6), std::invalid_argument);
}

TEST_CASE("closed-loop current errors decay at the designed rates", "[analysis][property]") {
    Scenario sc;
    sc.sample_period = 1e-5;
    sc.horizon = 0.04;
    sc.x0 = {2, 100, 6, 50, 48};
    const auto r = simulate(sc);
    const auto& p = sc.params;
    std::vector<double> e3(r.size()), e1(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        e3[i] = r.x3[i] - r.x3ref[i];
        e1[i] = r.x1[i] - r.x1ref[i];
    }
    CHECK(e3.front() == 1.0);
    CHECK(e1.front() == 2.0);
    CHECK(log_decay_slope(r.t, e3, 0, 0.005, 1e-9) == Approx(-(p.R2 + 10) / p.L2).epsilon(0.05));
    CHECK(log_decay_slope(r.t, e1, 0, 0.03, 1e-9) == Approx(-(p.R1 + 1) / p.L1).epsilon(0.05));
}

TEST_CASE("passivity balances on averaged runs", "[analysis][property]") {
    const auto p = ConverterParams::simulation();
    for (double il : {0.0, 5.0, -5.0}) {
        Scenario sc;
        sc.il = Schedule::constant(il);
        sc.x0.x3 = il;
        sc.x4star = Schedule({{0, 50}, {0.1, 70}});
        const auto r = simulate(fine(sc, 0.3));
        CHECK(passivity_residual_sigma2(r, p) <= 1e-3);
        CHECK(passivity_residual_sigma1(r, p) <= 1e-3);
    }
}

TEST_CASE("passivity signals", "[analysis]") {
    const auto p = ConverterParams::simulation();
    auto r = blank(3, 1e-4, 1e-5);
    for (std::size_t i = 0; i < 3; ++i) {
        r.x1[i] = 2, r.x2[i] = 100, r.x3[i] = 5, r.x4[i] = 50, r.x5[i] = 48, r.u2[i] = 0.5, r.il[i] = 5;
    }
    const auto s = passivity_signals(r, p);
    CHECK(s.y[1] == Approx(2.5));
    CHECK(s.w[1] == Approx(50));
    CHECK(s.v[1] == Approx(100 + 5 / p.C2 * 1e-4 / 0.5));
    CHECK(s.H1[0] == Approx(0.5 * p.L2 * 25 + 0.5 * p.C2 * 2500));
    CHECK(s.H2[0] == Approx(0.5 * p.L1 * 4 + 0.5 * p.C1 * 1e4 + 0.5 * p.Csc * 48 * 48));
    CHECK(s.d2[0] == Approx(p.R1 * 4 + p.G * 1e4 + p.Gsc * 48 * 48));
}

TEST_CASE("passivity residual preconditions", "[analysis]") {
    const auto p = ConverterParams::simulation();
    Scenario sc;
    sc.horizon = 0.05;
    sc.sample_period = 2e-4; // 20 integration steps
    const auto coarse = simulate(sc);
    CHECK_THROWS_AS(passivity_residual_sigma2(coarse, p), TooCoarse);
    CHECK_THROWS_AS(passivity_residual_sigma1(coarse, p), TooCoarse);
    auto z = blank(50, 1e-5, 1e-5);
    CHECK(passivity_residual_sigma2(z, p) == 0.0);
    z.model = ModelKind::switched;
    CHECK_THROWS_AS(passivity_residual_sigma2(z, p), std::invalid_argument);
}

TEST_CASE("plateaus split at every breakpoint", "[analysis]") {
    Scenario sc;
    sc.x4star = Schedule({{0, 45}, {0.15, 50}, {0.3, 55}, {0.45, 60}});
    sc.il = Schedule({{0, 5}, {0.6, -5}, {1, 0}, {1.4, 5}});
    sc.x2star = Schedule({{0, 100}, {0.3, 110}});
    sc.horizon = 2.6;
    const auto pl = plateaus(sc);
    REQUIRE(pl.size() == 7);
    CHECK(pl.front().start == 0);
    CHECK(pl[2].start == 0.3);
    CHECK(pl.back().start == 1.4);
    CHECK(pl.back().end == 2.6);
}

TEST_CASE("scenario metrics of the x4 step", "[analysis]") {
    Scenario sc;
    sc.x4star = Schedule({{0, 50}, {0.1, 70}});
    sc = fine(sc, 1.2);
    const auto r = simulate(sc);
    const auto m = scenario_metrics(sc, r);
    CHECK(m.channel == "x4");
    CHECK(m.ref_value == 70);
    CHECK(m.step_time == 0.1);
    CHECK(m.transient_cut == Approx(0.1 + default_transient_window(sc.gains, sc.params)));
    CHECK(m.kappa5_min == 1.8);
    CHECK(m.final_abs_x4_error < 1e-3);
    CHECK(m.steady_x4 == Approx(70).margin(1e-3));
    CHECK(m.max_abs_x2_error <= m.response.ultimate_bound);
    CHECK(m.response.ultimate_bound == Approx(m.phi_max / (sc.params.G + 1.8 * 0.05)));
    const auto x2 = scenario_metrics(sc, r, "x2");
    CHECK(x2.channel == "x2");
    CHECK(x2.ref_value == 100);
}

TEST_CASE("x2 error grows with the load magnitude and opposes its sign", "[analysis][property]") {
    std::vector<double> phis, errors;
    for (double il : {2.5, 5.0, -2.5, -5.0}) {
        Scenario sc;
        sc.il = Schedule::constant(il);
        sc.x0.x3 = il;
        sc = fine(sc, 0.6);
        const auto r = simulate(sc);
        const auto m = scenario_metrics(sc, r, "x2");
        phis.push_back(m.phi_max);
        errors.push_back(m.steady_x2 - 100);
        CHECK(m.max_abs_x2_error <= m.response.ultimate_bound);
    }
    CHECK(phis[1] > phis[0]);
    CHECK(phis[3] > phis[2]);
    CHECK(errors[0] < 0);
    CHECK(errors[1] < errors[0]);
    CHECK(errors[2] > 0);
    CHECK(errors[3] > errors[2]);
}
