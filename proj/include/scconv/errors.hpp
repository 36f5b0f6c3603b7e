#pragma once

#include <stdexcept>
#include <string>

namespace scconv {

/// Base for every error raised by the control law or the integrators.
class ControlError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// x2 fell below the configured floor; u2 = (...)/x2 is no longer meaningful.
class DivisionGuard : public ControlError {
public:
    using ControlError::ControlError;
};

/// x2 - (L1 kappa5 / C1) x1 came too close to zero in the deployed u1 law.
class SingularDenominator : public ControlError {
public:
    using ControlError::ControlError;
};

class InfeasibleGains : public ControlError {
public:
    using ControlError::ControlError;
};

class NonFinite : public ControlError {
public:
    using ControlError::ControlError;
};

/// A guard tripped during a simulation run. Carries the simulated time.
class SimError : public std::runtime_error {
public:
    SimError(double time, const std::string& what)
        : std::runtime_error("t=" + std::to_string(time) + " s: " + what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

/// Trajectory sampling too coarse for a finite-difference based check.
class TooCoarse : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace scconv
