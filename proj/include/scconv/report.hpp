#pragma once

#include "scconv/analysis.hpp"

#include <optional>
#include <string>
#include <vector>

namespace scconv {

/// {"<scenario>": {"<metric>": value, ...}} with NaN written as null.
std::string metrics_document(const std::string& scenario, const ScenarioMetrics& m,
                             std::optional<double> passivity_residual = std::nullopt);

struct SweepRow {
    double value = 0.0;
    std::string run_name;
    std::string error; // empty on success
    bool guard_trip = false;
    std::optional<ScenarioMetrics> metrics;
};

/// {"scenario": ..., "gain": ..., "runs": [{"value", "name", "status", "settling_time_2pct", ...}]}.
std::string sweep_summary_document(const std::string& scenario, const std::string& gain,
                                   const std::vector<SweepRow>& rows);

} // namespace scconv
