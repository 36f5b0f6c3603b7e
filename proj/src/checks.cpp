#include "scconv/checks.hpp"

#include "scconv/analysis.hpp"
#include "scconv/parallel.hpp"

#include <cmath>

namespace scconv {

std::vector<CheckResult> run_invariant_suite(const ConverterParams& p, const CheckOptions& opt) {
    std::vector<CheckResult> out;
    auto add = [&](std::string name, double value, double limit, bool pass, std::string detail) {
        out.push_back({std::move(name), value, limit, pass, std::move(detail)});
    };

    const auto plant = random_plant_samples(opt.plant_samples, opt.seed);

    double skew = 0.0;
    for (const auto& s : plant) {
        const auto f = ph_matrices(s.u, p);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) skew = std::max(skew, std::abs(f.J[i][j] + f.J[j][i]));
    }
    add("J skew-symmetric", skew, 0.0, skew == 0.0, "max |J + J^T| over samples");

    const double pb = max_power_balance_residual(plant, p);
    const double pb_serial = max_power_balance_residual_serial(plant, p);
    add("power balance", pb, 1e-9, pb <= 1e-9, "max relative residual");

    const double ph = max_ph_form_deviation(plant, p);
    add("port-Hamiltonian form", ph, 1e-12, ph <= 1e-12, "max relative deviation from the vector field");

    const Sigma2Gains g2;
    const auto ctrl = random_control_samples(opt.control_samples, opt.seed + 1, g2, p, 0.5);
    const double law = max_control_law_deviation(ctrl, g2, p);
    const double law_serial = max_control_law_deviation_serial(ctrl, g2, p);
    add("u1 law equivalence", law, 1e-9, law <= 1e-9, "deployed vs implicit realization");

    const auto gains = random_sigma1_gains(opt.gain_samples, opt.seed + 2);
    const auto stable = count_hurwitz(gains, p);
    add("error matrix Hurwitz", static_cast<double>(stable), static_cast<double>(gains.size()),
        stable == gains.size(), "random positive gains certified stable");

    const auto spr = spr_margin(p);
    add("SPR margin", spr.min_real_part, 0.0, spr.min_real_part > 0.0,
        "min Re G(jw) at w = " + std::to_string(spr.argmin_omega) + " rad/s");

    const auto eq = random_equilibrium_samples(opt.equilibrium_samples, opt.seed + 3);
    const auto feasible = count_feasible(eq, p);
    add("equilibrium infeasible for IL >= 0", static_cast<double>(feasible), 0.0, feasible == 0,
        "feasible draws out of " + std::to_string(eq.size()));

    const bool same = pb == pb_serial && law == law_serial && stable == count_hurwitz_serial(gains, p)
                      && feasible == count_feasible_serial(eq, p);
    add("parallel matches serial", same ? 0.0 : 1.0, 0.0, same, "OpenMP kernels vs serial reference");
    return out;
}

} // namespace scconv
