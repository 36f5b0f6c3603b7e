#pragma once

#include "scconv/errors.hpp"
#include "scconv/simulator.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scconv {

struct SweepSpec {
    std::string gain; // kappa1 .. kappa5
    std::vector<double> values;
    bool operator==(const SweepSpec&) const = default;
};

/// Parsed scenario document.
///
/// Format: one `key = value` per line, `#` starts a comment. Keys are dotted:
///   name
///   params.preset (simulation | experimental), params.l1 l2 c1 c2 csc r1 r2 g gsc
///   gains.kappa1 .. gains.kappa5 (required), gains.epsilon x1_min x1_max u_min u_max
///     hysteresis_band x2_floor denom_floor kappa5_mode (constant | scheduled)
///   schedule.x2star, schedule.x4star, schedule.il as [[time, value], ...] (required)
///   init.x1 .. init.x5
///   sim.model (averaged | switched), sim.dt, sim.fsw, sim.horizon (required), sim.sample_period
///   sweep.gain, sweep.values as [v, ...]
///   metrics.channel (x2 | x4)
/// Unknown or repeated keys, missing required keys and values that break an invariant raise ConfigError.
struct ScenarioConfig {
    Scenario scenario;
    std::optional<SweepSpec> sweep;
    std::string channel; // empty: chosen from the schedules
    bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

/// Canonical text: every key written explicitly in a fixed order, shortest round-trip numbers.
std::string serialize(const ScenarioConfig& cfg);

/// serialize(parse_config(text)).
std::string normalize(std::string_view text);

/// Sets kappa1 .. kappa5 by name. Throws ConfigError for other names.
void set_gain(ControllerGains& g, std::string_view name, double value);
double get_gain(const ControllerGains& g, std::string_view name);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

} // namespace scconv
