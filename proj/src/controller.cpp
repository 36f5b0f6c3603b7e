#include "scconv/controller.hpp"

#include "scconv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scconv {

std::string_view to_string(Kappa5Mode m) {
    switch (m) {
    case Kappa5Mode::constant: return "constant";
    case Kappa5Mode::scheduled: return "scheduled";
    }
    return "constant";
}

ControllerGains ControllerGains::experimental() {
    ControllerGains g;
    g.sigma1 = {1.0, 0.5, 10.0};
    g.sigma2.kappa4 = 1.0;
    g.sigma2.kappa5 = 1.8;
    return g;
}

std::string validate(const ControllerGains& g, const ConverterParams& p) {
    std::ostringstream err;
    const auto& s1 = g.sigma1;
    const auto& s2 = g.sigma2;
    if (!(s1.kappa1 > 0.0)) err << "kappa1 must be > 0; ";
    if (!(s1.kappa2 > 0.0)) err << "kappa2 must be > 0; ";
    if (!(s1.kappa3 > 0.0)) err << "kappa3 must be > 0; ";
    if (!(s2.kappa4 > 0.0)) err << "kappa4 must be > 0; ";
    if (!(s2.epsilon > 0.0)) err << "epsilon must be > 0; ";
    if (!(s2.x1_min < 0.0)) err << "x1_min must be < 0; ";
    if (!(s2.x1_max > 0.0)) err << "x1_max must be > 0; ";
    if (!(0.0 < s2.u_min && s2.u_min < s2.u_max && s2.u_max <= 1.0)) err << "duty limits must satisfy 0 < u_min < u_max <= 1; ";
    if (s2.u_min > 0.0 && !(s2.kappa5 >= -p.G / s2.u_min + s2.epsilon)) err << "kappa5 must be >= -G/u_min + epsilon; ";
    if (!(s2.kappa5 >= 0.0)) err << "kappa5 is a magnitude and must be >= 0; ";
    if (!(g.hysteresis_band >= 0.0)) err << "hysteresis_band must be >= 0; ";
    if (!(g.x2_floor > 0.0)) err << "x2_floor must be > 0; ";
    if (!(g.denom_floor > 0.0)) err << "denom_floor must be > 0; ";
    auto s = err.str();
    if (s.size() >= 2) s.resize(s.size() - 2);
    return s;
}

Sigma1Output sigma1_control(const PlantState& x, const ControllerState& cs, const References& refs, double il,
                            const Sigma1Gains& g1, const ConverterParams& p, double x2_floor) {
    if (!(x.x2 >= x2_floor)) {
        std::ostringstream os;
        os << "x2 = " << x.x2 << " V below floor " << x2_floor << " V";
        throw DivisionGuard(os.str());
    }
    const double e3 = x.x3 - cs.x3ref;
    const double e4 = x.x4 - refs.x4star;
    const double load_mismatch = x.x3 - il;

    Sigma1Output out;
    out.x3ref_dot = -(g1.kappa2 / p.C2) * load_mismatch - g1.kappa3 * e4;
    out.u2_raw = (x.x4 + p.R2 * cs.x3ref - g1.kappa1 * e3 - p.L2 * g1.kappa3 * e4
                  - (p.L2 * g1.kappa2 / p.C2) * load_mismatch)
                 / x.x2;
    return out;
}

Sigma2Output sigma2_control_deployed(const PlantState& x, const ControllerState& cs, double u2, double kappa5,
                                     const Sigma2Gains& g2, const ConverterParams& p, double denom_floor) {
    const double lc = p.L1 * kappa5 / p.C1;
    const double denom = x.x2 - lc * x.x1;
    if (!(std::abs(denom) >= denom_floor)) {
        std::ostringstream os;
        os << "|x2 - L1*kappa5*x1/C1| = " << std::abs(denom) << " V below floor " << denom_floor
           << " V (kappa5 = " << kappa5 << ", x1 = " << x.x1 << " A)";
        throw SingularDenominator(os.str());
    }
    const double e1 = x.x1 - cs.x1ref;
    // With +kappa4*e1 the current error obeys L1 d(e1)/dt = -(R1 + kappa4) e1.
    const double num = x.x5 - p.R1 * cs.x1ref + g2.kappa4 * e1 - lc * (x.x3 * u2 + p.G * x.x2);

    Sigma2Output out;
    out.u1_raw = num / denom;
    out.x1ref_dot = -(kappa5 / p.C1) * (x.x1 * out.u1_raw - x.x3 * u2 - p.G * x.x2);
    return out;
}

double sigma2_control_oracle(const PlantState& x, const ControllerState& cs, double u2, double kappa5,
                             const Sigma2Gains& g2, const ConverterParams& p) {
    const double e1 = x.x1 - cs.x1ref;
    // Right-hand side of u1 = (x5 + kappa4 e1 + w) / x2, with w built from dx2/dt at duty u1.
    auto rhs = [&](double u1) {
        const double x2_dot = (-p.G * x.x2 + x.x1 * u1 - x.x3 * u2) / p.C1;
        const double x1ref_dot = -kappa5 * x2_dot;
        const double w = -p.L1 * x1ref_dot - p.R1 * cs.x1ref;
        return (x.x5 + g2.kappa4 * e1 + w) / x.x2;
    };
    // The residual u - rhs(u) is affine in u: one secant step through two probes lands on its root.
    const double r0 = 0.0 - rhs(0.0);
    const double r1 = 1.0 - rhs(1.0);
    return -r0 / (r1 - r0);
}

int update_kappa5_sign(double x1, int previous_sign, double band) {
    if (x1 > band) return +1;
    if (x1 < -band) return -1;
    return previous_sign >= 0 ? +1 : -1;
}

double kappa5_schedule(double x2, int sign, const Sigma2Gains& g2, const ConverterParams& p) {
    const double ratio = p.C1 / p.L1;
    double magnitude = 0.0;
    if (sign >= 0) {
        const double bound = ratio * x2 / g2.x1_max + g2.epsilon;
        magnitude = std::max(g2.kappa5, bound);
    } else {
        const double bound = ratio * x2 / g2.x1_min - g2.epsilon; // negative
        magnitude = std::max(g2.kappa5, -bound);
    }
    const double lower = -p.G / g2.u_min + g2.epsilon;
    if (!std::isfinite(magnitude) || !(magnitude >= lower)) {
        std::ostringstream os;
        os << "kappa5 magnitude " << magnitude << " violates the lower limit " << lower;
        throw InfeasibleGains(os.str());
    }
    return sign >= 0 ? magnitude : -magnitude;
}

double kappa5_schedule(double x1, double x2, const Sigma2Gains& g2, const ConverterParams& p) {
    return kappa5_schedule(x2, x1 >= 0.0 ? +1 : -1, g2, p);
}

double active_kappa5(const PlantState& x, const ControllerState& cs, const ControllerGains& g, const ConverterParams& p) {
    if (g.kappa5_mode == Kappa5Mode::constant) return g.sigma2.kappa5;
    return kappa5_schedule(x.x2, cs.kappa5_sign, g.sigma2, p);
}

double saturate(double u_raw, double u_min, double u_max) {
    return std::clamp(u_raw, u_min, u_max);
}

ControlEvaluation evaluate_control(const PlantState& x, const ControllerState& cs, const References& refs, double il,
                                   double kappa5, const ControllerGains& g, const ConverterParams& p) {
    const auto& s2 = g.sigma2;
    ControlEvaluation ev;
    const auto s1 = sigma1_control(x, cs, refs, il, g.sigma1, p, g.x2_floor);
    ev.u2_raw = s1.u2_raw;
    ev.u.u2 = saturate(s1.u2_raw, s2.u_min, s2.u_max);
    ev.sat2 = ev.u.u2 != s1.u2_raw;
    ev.x3ref_dot = s1.x3ref_dot;

    const auto s2out = sigma2_control_deployed(x, cs, ev.u.u2, kappa5, s2, p, g.denom_floor);
    ev.u1_raw = s2out.u1_raw;
    ev.u.u1 = saturate(s2out.u1_raw, s2.u_min, s2.u_max);
    ev.sat1 = ev.u.u1 != s2out.u1_raw;
    ev.x1ref_dot = -(kappa5 / p.C1) * (x.x1 * ev.u.u1 - x.x3 * ev.u.u2 - p.G * x.x2);
    return ev;
}

ControllerStepResult controller_step(const PlantState& x, const ControllerState& cs, const References& refs, double il,
                                     const ControllerGains& g, const ConverterParams& p, double dt) {
    ControllerStepResult r;
    ControllerState current = cs;
    if (g.kappa5_mode == Kappa5Mode::scheduled)
        current.kappa5_sign = update_kappa5_sign(x.x1, cs.kappa5_sign, g.hysteresis_band);
    r.kappa5 = active_kappa5(x, current, g, p);

    const auto ev = evaluate_control(x, current, refs, il, r.kappa5, g, p);
    r.u = ev.u;
    r.sat1 = ev.sat1;
    r.sat2 = ev.sat2;
    r.next = current;
    r.next.x3ref += dt * ev.x3ref_dot;
    r.next.x1ref += dt * ev.x1ref_dot;
    return r;
}

ControllerState initial_controller_state(const PlantState& x0, const References& refs, double il,
                                         const ControllerGains& g, const ConverterParams& p) {
    ControllerState cs;
    cs.kappa5_sign = x0.x1 >= 0.0 ? +1 : -1;
    const double k5 = active_kappa5(x0, cs, g, p);
    cs.x3ref = il;
    cs.x1ref = -k5 * (x0.x2 - refs.x2star);
    return cs;
}

} // namespace scconv
