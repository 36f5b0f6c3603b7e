#pragma once

#include "scconv/plant.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace scconv {

struct CheckResult {
    std::string name;
    double value = 0.0; // measured quantity
    double limit = 0.0; // pass threshold
    bool pass = false;
    std::string detail;
};

struct CheckOptions {
    std::uint64_t seed = 20240611;
    std::size_t plant_samples = 10000;
    std::size_t control_samples = 1000;
    std::size_t gain_samples = 100;
    std::size_t equilibrium_samples = 10000;
};

/// Structural invariant suite of the plant and analysis layers on random draws.
std::vector<CheckResult> run_invariant_suite(const ConverterParams& p, const CheckOptions& opt = {});

} // namespace scconv
