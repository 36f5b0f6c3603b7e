#pragma once

#include "scconv/plant.hpp"

#include <string_view>

namespace scconv {

/// Gains of the x4 regulation loop (buck stage).
struct Sigma1Gains {
    double kappa1 = 10.0;
    double kappa2 = 1.0;
    double kappa3 = 500.0;

    bool valid() const { return kappa1 > 0.0 && kappa2 > 0.0 && kappa3 > 0.0; }
    bool operator==(const Sigma1Gains&) const = default;
};

/// Gains and envelopes of the x2 regulation loop (boost stage).
struct Sigma2Gains {
    double kappa4 = 1.0;
    double kappa5 = 1.8;  // magnitude; the sign is scheduled on x1
    double epsilon = 0.01;
    double x1_min = -50.0;
    double x1_max = 50.0;
    double u_min = 0.05;
    double u_max = 0.95;

    bool operator==(const Sigma2Gains&) const = default;
};

enum class Kappa5Mode {
    constant,  // kappa5 held at +kappa5
    scheduled, // sign follows x1 (with hysteresis), magnitude lifted to the envelope bound
};

std::string_view to_string(Kappa5Mode m);

struct ControllerGains {
    Sigma1Gains sigma1;
    Sigma2Gains sigma2;
    Kappa5Mode kappa5_mode = Kappa5Mode::constant;
    double hysteresis_band = 0.2; // [A]
    double x2_floor = 1.0;        // [V]
    double denom_floor = 0.5;     // [V]

    static ControllerGains simulation() { return {}; }
    static ControllerGains experimental();

    bool operator==(const ControllerGains&) const = default;
};

/// Empty string when valid, otherwise a message naming the violated invariant.
std::string validate(const ControllerGains& g, const ConverterParams& p);

struct References {
    double x2star = 100.0;
    double x4star = 50.0;
};

/// Dynamic-extension states plus the hysteresis-filtered sign of kappa5.
struct ControllerState {
    double x3ref = 0.0;
    double x1ref = 0.0;
    int kappa5_sign = +1;

    bool operator==(const ControllerState&) const = default;
};

struct Sigma1Output {
    double u2_raw = 0.0;
    double x3ref_dot = 0.0;
};

/// Dynamic state feedback regulating x4. Throws DivisionGuard if x2 < x2_floor.
Sigma1Output sigma1_control(const PlantState& x, const ControllerState& cs, const References& refs, double il,
                            const Sigma1Gains& g1, const ConverterParams& p, double x2_floor = 1.0);

struct Sigma2Output {
    double u1_raw = 0.0;
    double x1ref_dot = 0.0; // evaluated with the returned (unsaturated) u1
};

/// Derivative-free realization of the x2 loop. u2 is the duty applied to the buck leg.
/// Throws SingularDenominator when |x2 - L1 kappa5 x1 / C1| < denom_floor.
Sigma2Output sigma2_control_deployed(const PlantState& x, const ControllerState& cs, double u2, double kappa5,
                                     const Sigma2Gains& g2, const ConverterParams& p, double denom_floor = 0.5);

/// The x2 loop written with the open-loop derivative of x1ref, d(x1ref)/dt = -kappa5 dx2/dt,
/// expanded through the plant equation for x2. u1 appears on both sides; it is found as the root
/// of the affine residual from two probes rather than by the closed-form isolation used in the
/// deployed law. Test oracle only.
double sigma2_control_oracle(const PlantState& x, const ControllerState& cs, double u2, double kappa5,
                             const Sigma2Gains& g2, const ConverterParams& p);

/// Sign after the hysteresis filter: flips to -1 below -band and to +1 above +band.
int update_kappa5_sign(double x1, int previous_sign, double band);

/// Scheduled kappa5 for the given filtered sign. The magnitude is the larger of the user value and
/// the envelope bound of the active branch. Throws InfeasibleGains if the result cannot keep
/// |kappa5| >= -G/u_min + epsilon or the bound is not finite.
double kappa5_schedule(double x2, int sign, const Sigma2Gains& g2, const ConverterParams& p);

/// Convenience overload: sign taken from x1 with no hysteresis memory.
double kappa5_schedule(double x1, double x2, const Sigma2Gains& g2, const ConverterParams& p);

/// Active kappa5 for the given mode.
double active_kappa5(const PlantState& x, const ControllerState& cs, const ControllerGains& g, const ConverterParams& p);

double saturate(double u_raw, double u_min, double u_max);

/// Full control law at one instant: saturated duties plus extension rates.
struct ControlEvaluation {
    ControlInput u;
    double u1_raw = 0.0;
    double u2_raw = 0.0;
    double x3ref_dot = 0.0;
    double x1ref_dot = 0.0; // uses the saturated duties
    bool sat1 = false;
    bool sat2 = false;
};

ControlEvaluation evaluate_control(const PlantState& x, const ControllerState& cs, const References& refs, double il,
                                   double kappa5, const ControllerGains& g, const ConverterParams& p);

struct ControllerStepResult {
    ControlInput u;
    ControllerState next;
    double kappa5 = 0.0;
    bool sat1 = false;
    bool sat2 = false;
};

/// One sampled-data controller update: updates the kappa5 sign, evaluates the law and advances
/// x3ref, x1ref by an explicit Euler step of length dt with the saturated duties.
ControllerStepResult controller_step(const PlantState& x, const ControllerState& cs, const References& refs, double il,
                                     const ControllerGains& g, const ConverterParams& p, double dt);

/// x3ref(0) = IL(0), x1ref(0) = -kappa5(0) (x2(0) - x2star).
ControllerState initial_controller_state(const PlantState& x0, const References& refs, double il,
                                         const ControllerGains& g, const ConverterParams& p);

} // namespace scconv
