#pragma once

#include <array>

namespace scconv {

/// Physical constants of the two-stage converter with supercapacitor storage.
/// SI units throughout.
struct ConverterParams {
    double L1 = 10e-3;    // boost-side inductance [H]
    double L2 = 10e-3;    // buck-side inductance [H]
    double C1 = 8.8e-3;   // intermediate bus capacitance [F]
    double C2 = 2.2e-3;   // output capacitance [F]
    double Csc = 62.5;    // supercapacitor [F]
    double R1 = 113.2e-3; // L1 series resistance [Ohm]
    double R2 = 100e-3;   // L2 series resistance [Ohm]
    double G = 50e-6;     // conductance on the x2 node [S]
    double Gsc = 200e-6;  // supercapacitor leakage [S]

    /// Simulation parameter set (the defaults above).
    static ConverterParams simulation() { return {}; }
    /// Values measured on the test bench.
    static ConverterParams experimental();

    bool valid() const;
    bool operator==(const ConverterParams&) const = default;
};

/// x1, x3: inductor currents [A]; x2, x4, x5: capacitor voltages [V].
struct PlantState {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
    double x4 = 0.0;
    double x5 = 0.0;

    std::array<double, 5> as_array() const { return {x1, x2, x3, x4, x5}; }
    static PlantState from_array(const std::array<double, 5>& a) { return {a[0], a[1], a[2], a[3], a[4]}; }
    bool operator==(const PlantState&) const = default;
};

/// Time derivative of a PlantState (per-second rates).
using PlantRates = PlantState;

/// Duty ratios of the boost (u1) and buck (u2) legs.
struct ControlInput {
    double u1 = 0.0;
    double u2 = 0.0;
};

using Matrix5 = std::array<std::array<double, 5>, 5>;
using Vector5 = std::array<double, 5>;

/// Q xdot = (J(u) - R) x + g IL
struct PortHamiltonianForm {
    Matrix5 J{};
    Matrix5 R{};
    Vector5 g{};
    Matrix5 Q{};
};

PlantRates derivative(const PlantState& x, const ControlInput& u, double il, const ConverterParams& p);

PortHamiltonianForm ph_matrices(const ControlInput& u, const ConverterParams& p);

/// Evaluates Q^-1 [(J(u) - R) x + g IL] from the matrices; same vector field as derivative().
PlantRates derivative_ph(const PlantState& x, const ControlInput& u, double il, const ConverterParams& p);

/// 1/2 x^T Q x [J]
double stored_energy(const PlantState& x, const ConverterParams& p);

/// x^T R x [W]
double dissipated_power(const PlantState& x, const ConverterParams& p);

/// dH/dt along the vector field minus (-x^T R x - x4 IL). Zero up to rounding.
double power_balance_residual(const PlantState& x, const ControlInput& u, double il, const ConverterParams& p);

/// Scale for power_balance_residual: sum of |x_i Q_ii xdot_i|.
double power_balance_scale(const PlantState& x, const ControlInput& u, double il, const ConverterParams& p);

struct EquilibriumReport {
    bool feasible = false;
    double x5star_squared = 0.0;
    double x1star = 0.0; // only meaningful when feasible
    double x3star = 0.0;
};

/// Checks whether a forced equilibrium with x2 = x2star, x4 = x4star exists for a constant load IL.
EquilibriumReport equilibrium_feasibility(double x2star, double x4star, double il, const ConverterParams& p);

} // namespace scconv
