#include "scconv/plant.hpp"

#include <cmath>

namespace scconv {

ConverterParams ConverterParams::experimental() {
    ConverterParams p;
    p.L1 = 8.78e-3;
    p.L2 = 8.55e-3;
    p.C1 = 2.19e-3;
    p.C2 = 7.6e-3;
    p.Csc = 62.5; // not measured on the bench; simulation value
    p.R1 = 1.58;
    p.R2 = 1.69;
    p.G = 50e-6;
    p.Gsc = 200e-6;
    return p;
}

bool ConverterParams::valid() const {
    for (double v : {L1, L2, C1, C2, Csc, R1, R2, G, Gsc}) {
        if (!(v > 0.0) || !std::isfinite(v)) return false;
    }
    return true;
}

PlantRates derivative(const PlantState& x, const ControlInput& u, double il, const ConverterParams& p) {
    PlantRates d;
    d.x1 = (-p.R1 * x.x1 + x.x5 - x.x2 * u.u1) / p.L1;
    d.x2 = (-p.G * x.x2 + x.x1 * u.u1 - x.x3 * u.u2) / p.C1;
    d.x3 = (-p.R2 * x.x3 - x.x4 + x.x2 * u.u2) / p.L2;
    d.x4 = (x.x3 - il) / p.C2;
    d.x5 = (-p.Gsc * x.x5 - x.x1) / p.Csc;
    return d;
}

PortHamiltonianForm ph_matrices(const ControlInput& u, const ConverterParams& p) {
    PortHamiltonianForm f;
    f.J[0][1] = -u.u1;
    f.J[1][0] = u.u1;
    f.J[1][2] = -u.u2;
    f.J[2][1] = u.u2;
    // Duty-independent couplings: x5 drives the x1 inductor and x4 loads the x3 inductor.
    f.J[0][4] = 1.0;
    f.J[4][0] = -1.0;
    f.J[2][3] = -1.0;
    f.J[3][2] = 1.0;

    f.R[0][0] = p.R1;
    f.R[1][1] = p.G;
    f.R[2][2] = p.R2;
    f.R[4][4] = p.Gsc;

    f.g = {0.0, 0.0, 0.0, -1.0, 0.0};

    const Vector5 q{p.L1, p.C1, p.L2, p.C2, p.Csc};
    for (int i = 0; i < 5; ++i) f.Q[i][i] = q[i];
    return f;
}

PlantRates derivative_ph(const PlantState& x, const ControlInput& u, double il, const ConverterParams& p) {
    const auto f = ph_matrices(u, p);
    const auto xv = x.as_array();
    Vector5 out{};
    for (int i = 0; i < 5; ++i) {
        double acc = f.g[i] * il;
        for (int j = 0; j < 5; ++j) acc += (f.J[i][j] - f.R[i][j]) * xv[j];
        out[i] = acc / f.Q[i][i];
    }
    return PlantState::from_array(out);
}

double stored_energy(const PlantState& x, const ConverterParams& p) {
    return 0.5 * (p.L1 * x.x1 * x.x1 + p.C1 * x.x2 * x.x2 + p.L2 * x.x3 * x.x3 + p.C2 * x.x4 * x.x4
                  + p.Csc * x.x5 * x.x5);
}

double dissipated_power(const PlantState& x, const ConverterParams& p) {
    return p.R1 * x.x1 * x.x1 + p.G * x.x2 * x.x2 + p.R2 * x.x3 * x.x3 + p.Gsc * x.x5 * x.x5;
}

namespace {

Vector5 stored_power_terms(const PlantState& x, const ControlInput& u, double il, const ConverterParams& p) {
    const auto d = derivative(x, u, il, p);
    return {p.L1 * x.x1 * d.x1, p.C1 * x.x2 * d.x2, p.L2 * x.x3 * d.x3, p.C2 * x.x4 * d.x4,
            p.Csc * x.x5 * d.x5};
}

} // namespace

double power_balance_residual(const PlantState& x, const ControlInput& u, double il, const ConverterParams& p) {
    double stored = 0.0;
    for (double t : stored_power_terms(x, u, il, p)) stored += t;
    return stored - (-dissipated_power(x, p) - x.x4 * il);
}

double power_balance_scale(const PlantState& x, const ControlInput& u, double il, const ConverterParams& p) {
    double s = 0.0;
    for (double t : stored_power_terms(x, u, il, p)) s += std::abs(t);
    return s;
}

EquilibriumReport equilibrium_feasibility(double x2star, double x4star, double il, const ConverterParams& p) {
    EquilibriumReport r;
    r.x3star = il;
    const double numerator = -p.G * x2star * x2star - p.R2 * il * il - x4star * il;
    r.x5star_squared = numerator / (p.Gsc * (1.0 + p.R1 * p.Gsc));
    r.feasible = r.x5star_squared >= 0.0;
    if (r.feasible) r.x1star = -p.Gsc * std::sqrt(r.x5star_squared);
    return r;
}

} // namespace scconv
