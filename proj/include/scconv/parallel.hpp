#pragma once

#include "scconv/analysis.hpp"
#include "scconv/controller.hpp"
#include "scconv/plant.hpp"
#include "scconv/simulator.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace scconv {

/// Result of one simulation in a batch. Exactly one of `result` and `error` is set.
struct RunOutcome {
    std::optional<SimResult> result;
    std::string error;
    bool guard_trip = false; // error came from a SimError
    double error_time = 0.0;
};

RunOutcome run_one(const Scenario& sc);

/// Runs every scenario on up to `jobs` OpenMP threads (0 = runtime default).
/// Outcomes are returned in input order and do not depend on the thread count.
std::vector<RunOutcome> run_batch(const std::vector<Scenario>& scenarios, int jobs = 0);
std::vector<RunOutcome> run_batch_serial(const std::vector<Scenario>& scenarios);

/// Plant operating point for the structural checks.
struct PlantSample {
    PlantState x;
    ControlInput u;
    double il = 0.0;
};

/// Uniform draws over a box around the operating range: |x1|, |x3| <= 60 A, 1 <= x2 <= 300 V,
/// 0 <= x4 <= 200 V, 1 <= x5 <= 100 V, duties in [0, 1], |IL| <= 20 A.
std::vector<PlantSample> random_plant_samples(std::size_t n, std::uint64_t seed);

/// Largest power-balance residual relative to power_balance_scale.
double max_power_balance_residual(const std::vector<PlantSample>& s, const ConverterParams& p);
double max_power_balance_residual_serial(const std::vector<PlantSample>& s, const ConverterParams& p);

/// Largest |derivative - derivative_ph| relative to the largest component magnitude.
double max_ph_form_deviation(const std::vector<PlantSample>& s, const ConverterParams& p);
double max_ph_form_deviation_serial(const std::vector<PlantSample>& s, const ConverterParams& p);

/// Controller operating point for the two realizations of the x2 loop.
struct ControlSample {
    PlantState x;
    ControllerState cs;
    double u2 = 0.5;
    double kappa5 = 1.8;
};

/// Draws whose kappa5 comes from the active branch of the schedule and whose law denominator
/// clears denom_floor. Rejected draws are redrawn.
std::vector<ControlSample> random_control_samples(std::size_t n, std::uint64_t seed, const Sigma2Gains& g2,
                                                  const ConverterParams& p, double denom_floor);

/// Largest |u1_deployed - u1_oracle| / max(1, |u1_deployed|).
double max_control_law_deviation(const std::vector<ControlSample>& s, const Sigma2Gains& g2,
                                 const ConverterParams& p);
double max_control_law_deviation_serial(const std::vector<ControlSample>& s, const Sigma2Gains& g2,
                                        const ConverterParams& p);

/// Gains drawn log-uniformly over [1e-2, 1e4].
std::vector<Sigma1Gains> random_sigma1_gains(std::size_t n, std::uint64_t seed);

std::size_t count_hurwitz(const std::vector<Sigma1Gains>& gains, const ConverterParams& p);
std::size_t count_hurwitz_serial(const std::vector<Sigma1Gains>& gains, const ConverterParams& p);

/// Equilibrium requests with IL >= 0, x2star > 0 and x4star > 0.
struct EquilibriumSample {
    double x2star = 100.0;
    double x4star = 50.0;
    double il = 5.0;
};

std::vector<EquilibriumSample> random_equilibrium_samples(std::size_t n, std::uint64_t seed);

std::size_t count_feasible(const std::vector<EquilibriumSample>& s, const ConverterParams& p);
std::size_t count_feasible_serial(const std::vector<EquilibriumSample>& s, const ConverterParams& p);

} // namespace scconv
