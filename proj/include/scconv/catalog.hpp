#pragma once

#include "scconv/config.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scconv {

/// What the acceptance suite asserts about an entry.
struct ExpectedMetrics {
    std::string summary;
    std::optional<std::array<double, 2>> settling_window; // [s], base run
    std::optional<double> final_value;                    // base run, metrics channel [V]
    double final_tolerance = 0.0;
    std::optional<std::array<double, 2>> steady_x2_band;  // every sweep member [V]
    std::string trend;                                    // ordering checked across the sweep, see catalog.cpp
    std::vector<double> plateau_levels;                   // x4 levels held in order [V]
};

struct CatalogEntry {
    std::string name;
    std::string figure;
    std::string description;
    std::string config_text;
    ExpectedMetrics expected;

    ScenarioConfig config() const { return parse_config(config_text); }
};

const std::vector<CatalogEntry>& catalog();

/// Exact name, or a unique prefix such as "fig5a". Returns nullptr when nothing or several match.
const CatalogEntry* find_catalog_entry(std::string_view name);

/// Replaces converter parameters and kappa1 .. kappa5 with the bench values.
void apply_experimental(ScenarioConfig& cfg);

} // namespace scconv
