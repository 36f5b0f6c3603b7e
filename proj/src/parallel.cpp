#include "scconv/parallel.hpp"

#include "scconv/errors.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace scconv {

RunOutcome run_one(const Scenario& sc) {
    RunOutcome out;
    try {
        out.result = simulate(sc);
    } catch (const SimError& e) {
        out.error = e.what();
        out.guard_trip = true;
        out.error_time = e.time();
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

std::vector<RunOutcome> run_batch(const std::vector<Scenario>& scenarios, int jobs) {
    std::vector<RunOutcome> out(scenarios.size());
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
    const auto n = static_cast<long>(scenarios.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (long i = 0; i < n; ++i) out[i] = run_one(scenarios[i]);
    return out;
}

std::vector<RunOutcome> run_batch_serial(const std::vector<Scenario>& scenarios) {
    std::vector<RunOutcome> out;
    out.reserve(scenarios.size());
    for (const auto& sc : scenarios) out.push_back(run_one(sc));
    return out;
}

std::vector<PlantSample> random_plant_samples(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    std::vector<PlantSample> s(n);
    for (auto& v : s) {
        v.x = {uni(-60, 60), uni(1, 300), uni(-60, 60), uni(0, 200), uni(1, 100)};
        v.u = {uni(0, 1), uni(0, 1)};
        v.il = uni(-20, 20);
    }
    return s;
}

namespace {

double power_balance_rel(const PlantSample& v, const ConverterParams& p) {
    const double scale = power_balance_scale(v.x, v.u, v.il, p);
    const double r = std::abs(power_balance_residual(v.x, v.u, v.il, p));
    return scale > 0.0 ? r / scale : r;
}

double ph_form_rel(const PlantSample& v, const ConverterParams& p) {
    const auto a = derivative(v.x, v.u, v.il, p).as_array();
    const auto b = derivative_ph(v.x, v.u, v.il, p).as_array();
    double diff = 0.0, mag = 0.0;
    for (int i = 0; i < 5; ++i) {
        diff = std::max(diff, std::abs(a[i] - b[i]));
        mag = std::max(mag, std::abs(a[i]));
    }
    return mag > 0.0 ? diff / mag : diff;
}

double control_rel(const ControlSample& v, const Sigma2Gains& g2, const ConverterParams& p) {
    const double deployed = sigma2_control_deployed(v.x, v.cs, v.u2, v.kappa5, g2, p, 0.0).u1_raw;
    const double oracle = sigma2_control_oracle(v.x, v.cs, v.u2, v.kappa5, g2, p);
    return std::abs(deployed - oracle) / std::max(1.0, std::abs(deployed));
}

template <class T, class F>
double parallel_max(const std::vector<T>& items, F&& f) {
    double worst = 0.0;
    const auto n = static_cast<long>(items.size());
#pragma omp parallel for reduction(max : worst)
    for (long i = 0; i < n; ++i) worst = std::max(worst, f(items[i]));
    return worst;
}

template <class T, class F>
double serial_max(const std::vector<T>& items, F&& f) {
    double worst = 0.0;
    for (const auto& v : items) worst = std::max(worst, f(v));
    return worst;
}

template <class T, class F>
std::size_t parallel_count(const std::vector<T>& items, F&& f) {
    long count = 0;
    const auto n = static_cast<long>(items.size());
#pragma omp parallel for reduction(+ : count)
    for (long i = 0; i < n; ++i) count += f(items[i]) ? 1 : 0;
    return static_cast<std::size_t>(count);
}

template <class T, class F>
std::size_t serial_count(const std::vector<T>& items, F&& f) {
    std::size_t count = 0;
    for (const auto& v : items) count += f(v) ? 1 : 0;
    return count;
}

} // namespace

double max_power_balance_residual(const std::vector<PlantSample>& s, const ConverterParams& p) {
    return parallel_max(s, [&](const PlantSample& v) { return power_balance_rel(v, p); });
}

double max_power_balance_residual_serial(const std::vector<PlantSample>& s, const ConverterParams& p) {
    return serial_max(s, [&](const PlantSample& v) { return power_balance_rel(v, p); });
}

double max_ph_form_deviation(const std::vector<PlantSample>& s, const ConverterParams& p) {
    return parallel_max(s, [&](const PlantSample& v) { return ph_form_rel(v, p); });
}

double max_ph_form_deviation_serial(const std::vector<PlantSample>& s, const ConverterParams& p) {
    return serial_max(s, [&](const PlantSample& v) { return ph_form_rel(v, p); });
}

std::vector<ControlSample> random_control_samples(std::size_t n, std::uint64_t seed, const Sigma2Gains& g2,
                                                  const ConverterParams& p, double denom_floor) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    std::vector<ControlSample> s;
    s.reserve(n);
    while (s.size() < n) {
        ControlSample v;
        const int sign = uni(0, 1) < 0.5 ? -1 : +1;
        const double x1 = sign > 0 ? uni(0, g2.x1_max) : uni(g2.x1_min, 0);
        v.x = {x1, uni(20, 300), uni(-40, 40), uni(1, 200), uni(1, 100)};
        v.cs = {uni(-40, 40), uni(-60, 60), sign};
        v.u2 = uni(g2.u_min, g2.u_max);
        v.kappa5 = kappa5_schedule(v.x.x2, sign, g2, p);
        if (std::abs(v.x.x2 - p.L1 * v.kappa5 * v.x.x1 / p.C1) < denom_floor) continue;
        s.push_back(v);
    }
    return s;
}

double max_control_law_deviation(const std::vector<ControlSample>& s, const Sigma2Gains& g2,
                                 const ConverterParams& p) {
    return parallel_max(s, [&](const ControlSample& v) { return control_rel(v, g2, p); });
}

double max_control_law_deviation_serial(const std::vector<ControlSample>& s, const Sigma2Gains& g2,
                                        const ConverterParams& p) {
    return serial_max(s, [&](const ControlSample& v) { return control_rel(v, g2, p); });
}

std::vector<Sigma1Gains> random_sigma1_gains(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> expo(-2.0, 4.0);
    std::vector<Sigma1Gains> g(n);
    for (auto& v : g) v = {std::pow(10.0, expo(rng)), std::pow(10.0, expo(rng)), std::pow(10.0, expo(rng))};
    return g;
}

std::size_t count_hurwitz(const std::vector<Sigma1Gains>& gains, const ConverterParams& p) {
    return parallel_count(gains, [&](const Sigma1Gains& g) { return hurwitz(sigma1_error_matrix(g, p)); });
}

std::size_t count_hurwitz_serial(const std::vector<Sigma1Gains>& gains, const ConverterParams& p) {
    return serial_count(gains, [&](const Sigma1Gains& g) { return hurwitz(sigma1_error_matrix(g, p)); });
}

std::vector<EquilibriumSample> random_equilibrium_samples(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    std::vector<EquilibriumSample> s(n);
    for (auto& v : s) v = {uni(1e-3, 1000), uni(1e-3, 1000), uni(0, 100)};
    return s;
}

std::size_t count_feasible(const std::vector<EquilibriumSample>& s, const ConverterParams& p) {
    return parallel_count(s, [&](const EquilibriumSample& v) {
        return equilibrium_feasibility(v.x2star, v.x4star, v.il, p).feasible;
    });
}

std::size_t count_feasible_serial(const std::vector<EquilibriumSample>& s, const ConverterParams& p) {
    return serial_count(s, [&](const EquilibriumSample& v) {
        return equilibrium_feasibility(v.x2star, v.x4star, v.il, p).feasible;
    });
}

} // namespace scconv
