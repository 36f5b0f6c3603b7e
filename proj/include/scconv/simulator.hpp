#pragma once

#include "scconv/controller.hpp"
#include "scconv/errors.hpp"
#include "scconv/plant.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace scconv {

struct Breakpoint {
    double time = 0.0;
    double value = 0.0;
    bool operator==(const Breakpoint&) const = default;
};

/// Piecewise-constant signal: each value holds from its breakpoint until the next one.
class Schedule {
public:
    Schedule() = default;
    explicit Schedule(std::vector<Breakpoint> points);
    static Schedule constant(double value) { return Schedule({{0.0, value}}); }

    double value_at(double t) const;
    const std::vector<Breakpoint>& points() const { return points_; }
    /// Empty string when sorted, non-empty and starting at t = 0.
    std::string check() const;

    bool operator==(const Schedule&) const = default;

private:
    std::vector<Breakpoint> points_;
};

enum class ModelKind { averaged, switched };

std::string_view to_string(ModelKind m);

struct Scenario {
    std::string name = "scenario";
    ConverterParams params;
    ControllerGains gains;
    Schedule x2star = Schedule::constant(100.0);
    Schedule x4star = Schedule::constant(50.0);
    Schedule il = Schedule::constant(5.0);
    PlantState x0{0.0, 100.0, 5.0, 50.0, 48.0};
    ModelKind model = ModelKind::averaged;
    double fsw = 10e3;          // [Hz]
    double dt = 1e-5;           // [s]
    double horizon = 1.0;       // [s]
    double sample_period = 1e-4; // [s]

    /// Empty string when the scenario is runnable, otherwise the first violated constraint.
    std::string check() const;
    bool operator==(const Scenario&) const = default;
};

struct SaturationInterval {
    int channel = 1; // 1 -> u1, 2 -> u2
    double start = 0.0;
    double end = 0.0;
};

/// Non-fatal physical-range violation (x2, x4 or x5 not positive).
struct PositivityEvent {
    double time = 0.0;
    std::string channel;
    double value = 0.0;
};

/// Uniformly sampled closed-loop trajectory.
struct SimResult {
    std::string name;
    ModelKind model = ModelKind::averaged;
    double dt = 0.0; // integration step of the run [s]
    std::vector<double> t, x1, x2, x3, x4, x5, u1, u2, x3ref, x1ref, kappa5, il, x2star, x4star;
    std::vector<std::uint8_t> sat1, sat2;
    std::vector<SaturationInterval> saturation;
    std::vector<PositivityEvent> positivity_events;

    std::size_t size() const { return t.size(); }
    PlantState state(std::size_t i) const { return {x1[i], x2[i], x3[i], x4[i], x5[i]}; }
    /// Column by CSV name (t, x1, ..., x4star). Throws std::out_of_range for unknown names.
    const std::vector<double>& column(std::string_view name) const;
};

/// Exact CSV header written by write_csv.
inline constexpr std::string_view kCsvHeader = "t,x1,x2,x3,x4,x5,u1,u2,x3ref,x1ref,kappa5,il,x2star,x4star,sat1,sat2";

void write_csv(const SimResult& r, std::ostream& os);
std::string to_csv(const SimResult& r);

/// Classical fourth-order Runge-Kutta step. Throws NonFinite if the result is not finite.
template <std::size_t N, class Field>
std::array<double, N> rk4_step(Field&& field, const std::array<double, N>& y, double dt) {
    auto axpy = [](const std::array<double, N>& a, double h, const std::array<double, N>& b) {
        std::array<double, N> out;
        for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + h * b[i];
        return out;
    };
    const auto k1 = field(y);
    const auto k2 = field(axpy(y, 0.5 * dt, k1));
    const auto k3 = field(axpy(y, 0.5 * dt, k2));
    const auto k4 = field(axpy(y, dt, k3));
    std::array<double, N> next;
    for (std::size_t i = 0; i < N; ++i) {
        next[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(next[i])) throw NonFinite("state component " + std::to_string(i) + " became non-finite");
    }
    return next;
}

/// Open-loop plant integration over [0, duration] with fixed duties. In switched mode the duties
/// drive a triangular carrier comparator starting at its valley; in averaged mode they are applied
/// directly. Steps never exceed dt_max and are split at every switching edge.
PlantState integrate_open_loop(const PlantState& x0, const ControlInput& duty, double il, const ConverterParams& p,
                               ModelKind model, double fsw, double duration, double dt_max);

/// Binary switch value of a leg with duty `duty` at phase in [0, 1) of a triangular carrier
/// that is 0 at phase 0 and 1 at phase 1/2. The switch conducts while duty exceeds the carrier.
int pwm_switch(double duty, double phase);

SimResult simulate_averaged(const Scenario& sc);
SimResult simulate_switched(const Scenario& sc);
/// Dispatches on sc.model.
SimResult simulate(const Scenario& sc);

/// Sample times k * sample_period, k = 0 .. floor(horizon / sample_period).
std::vector<double> sample_times(const Scenario& sc);

} // namespace scconv
