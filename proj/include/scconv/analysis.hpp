#pragma once

#include "scconv/controller.hpp"
#include "scconv/plant.hpp"
#include "scconv/simulator.hpp"

#include <array>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace scconv {

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Linear error dynamics of the x4 loop in coordinates (x3 - x3ref, x4 - x4star, z).
struct ErrorSystemSigma1 {
    Matrix3 A{};
};

ErrorSystemSigma1 sigma1_error_matrix(const Sigma1Gains& g1, const ConverterParams& p);

/// Monic characteristic polynomial of a 3x3 matrix, highest power first: {1, c2, c1, c0}.
std::array<double, 4> characteristic_polynomial(const Matrix3& A);

/// True iff every root of the polynomial (highest power first) has negative real part.
/// Decided by the Routh array; a zero in the first column counts as not stable.
bool routh_hurwitz(const std::vector<double>& coeffs);

bool hurwitz(const ErrorSystemSigma1& sys);

/// Slowest decay rate [1/s] among the error modes of both loops: the x4 loop matrix and the
/// x1 current error, which decays at (R1 + kappa4)/L1.
double slowest_decay_rate(const ControllerGains& g, const ConverterParams& p);

/// Ten time constants of the slowest error mode.
double default_transient_window(const ControllerGains& g, const ConverterParams& p);

/// Real part of s/(L2 s^2 + R2 s + 1/C2) at s = j omega.
double spr_real_part(const ConverterParams& p, double omega);

struct SprMargin {
    double min_real_part = 0.0;
    double argmin_omega = 0.0; // [rad/s]
};

/// 400 log-spaced frequencies over [1, 1e6] rad/s.
std::vector<double> default_frequency_grid();

/// Throws std::invalid_argument for an empty grid or a non-positive frequency.
SprMargin spr_margin(const ConverterParams& p, const std::vector<double>& omega_grid = default_frequency_grid());

/// Port signals and sub-energies of the interconnection, one entry per sample.
struct PassivitySignals {
    std::vector<double> v;  // x2 + (IL / C2) t / u2
    std::vector<double> y;  // x3 u2
    std::vector<double> w;  // x2 u2
    std::vector<double> H1; // buck-side energy [J]
    std::vector<double> H2; // boost-side energy [J]
    std::vector<double> d2; // boost-side dissipation [W]
};

PassivitySignals passivity_signals(const SimResult& traj, const ConverterParams& p);

/// Time derivative of a sampled signal: central differences inside, one-sided second-order
/// stencils at the ends. Samples next to a jump in `segment_id` use the one-sided stencil
/// that stays on their own side. A sample isolated between two jumps gets NaN.
std::vector<double> sampled_derivative(const std::vector<double>& t, const std::vector<double>& f,
                                       const std::vector<int>& segment_id = {});

/// Worst |dH2/dt + d2 + x2 x3 u2| over the samples, divided by the largest |d2| + |x2 x3 u2|.
/// Requires an averaged-mode trajectory sampled at most every 10 integration steps; throws
/// TooCoarse otherwise and std::invalid_argument for a switched trajectory.
double passivity_residual_sigma2(const SimResult& traj, const ConverterParams& p);

/// Same check for the buck side: dH1/dt = -R2 x3^2 + x2 x3 u2 - x4 IL.
double passivity_residual_sigma1(const SimResult& traj, const ConverterParams& p);

/// Supremum of |x1 - x1ref| + |x3| + |G x2star| over transient_cut <= t <= window_end.
/// Throws std::invalid_argument if the window holds no sample.
double phi_sup(const SimResult& traj, double x2star, const ConverterParams& p, double transient_cut,
               double window_end = std::numeric_limits<double>::infinity());

/// phiM / (G + kappa5 u_min). Throws std::invalid_argument if the denominator is not positive.
double ultimate_bound(double phiM, double kappa5, const Sigma2Gains& g2, const ConverterParams& p);

struct ResponseMetrics {
    double settling_time_2pct = 0.0; // measured from step_time [s]
    bool settled = true;
    double overshoot_pct = 0.0;
    double steady_state_error = 0.0; // [V]
    double ultimate_bound = std::numeric_limits<double>::quiet_NaN(); // [V]
};

/// Step-response figures of a channel ("x2" or "x4") over step_time <= t <= window_end.
/// Settling is the first time after which the channel stays within 2% of ref_value.
/// Overshoot is the largest excursion past ref_value as a percentage of the step size, where the
/// step starts at the channel value at step_time. Steady-state error is the mean over the last
/// 10% of the window minus ref_value.
ResponseMetrics response_metrics(const SimResult& traj, std::string_view channel, double ref_value, double step_time,
                                 double window_end = std::numeric_limits<double>::infinity());

/// Least-squares slope of log|e| against t over t0 <= t <= t1, skipping samples with |e| <= floor.
double log_decay_slope(const std::vector<double>& t, const std::vector<double>& e, double t0, double t1,
                       double floor = 0.0);

/// Plateau of a scenario: interval on which all three schedules are constant.
struct Plateau {
    double start = 0.0;
    double end = 0.0;
};

std::vector<Plateau> plateaus(const Scenario& sc);

/// Scenario-level figures written to the metrics JSON.
struct ScenarioMetrics {
    std::string channel;     // "x2" or "x4"
    double ref_value = 0.0;  // final reference of the channel
    double step_time = 0.0;  // last breakpoint of the channel reference
    ResponseMetrics response;
    double transient_cut = 0.0;
    double phi_max = 0.0;
    double kappa5_min = 0.0; // smallest |kappa5| active after the cut
    double max_abs_x2_error = 0.0; // after the cut
    double steady_x2 = 0.0;  // mean of x2 over the last 10% of the horizon
    double steady_x4 = 0.0;
    double final_abs_x4_error = 0.0;
};

/// channel: "x2", "x4" or empty to pick x2 when its reference moves and x4 otherwise.
ScenarioMetrics scenario_metrics(const Scenario& sc, const SimResult& traj, std::string_view channel = {});

} // namespace scconv
