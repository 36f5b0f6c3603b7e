// Serial reference vs OpenMP kernels: random-sample invariant checks and a gain-sweep batch.

#include "scconv/catalog.hpp"
#include "scconv/parallel.hpp"

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <functional>

using namespace scconv;

namespace {

double seconds(const std::function<void()>& f) {
    const double t0 = omp_get_wtime();
    f();
    return omp_get_wtime() - t0;
}

void report(const char* name, double serial, double parallel, bool same) {
    std::printf("%-28s serial %9.4f s  parallel %9.4f s  speedup %5.2fx  %s\n", name, serial, parallel,
                serial / parallel, same ? "identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 2000000;
    const auto p = ConverterParams::simulation();
    std::printf("threads %d, samples %zu\n", omp_get_max_threads(), n);

    const auto plant = random_plant_samples(n, 1);
    double a = 0, b = 0;
    const double ts = seconds([&] { a = max_power_balance_residual_serial(plant, p); });
    const double tp = seconds([&] { b = max_power_balance_residual(plant, p); });
    report("power balance", ts, tp, a == b);

    const double ts2 = seconds([&] { a = max_ph_form_deviation_serial(plant, p); });
    const double tp2 = seconds([&] { b = max_ph_form_deviation(plant, p); });
    report("port-Hamiltonian form", ts2, tp2, a == b);

    const Sigma2Gains g2;
    const auto ctrl = random_control_samples(n / 4, 2, g2, p, 0.5);
    const double ts3 = seconds([&] { a = max_control_law_deviation_serial(ctrl, g2, p); });
    const double tp3 = seconds([&] { b = max_control_law_deviation(ctrl, g2, p); });
    report("u1 law equivalence", ts3, tp3, a == b);

    const auto gains = random_sigma1_gains(n, 3);
    std::size_t ca = 0, cb = 0;
    const double ts4 = seconds([&] { ca = count_hurwitz_serial(gains, p); });
    const double tp4 = seconds([&] { cb = count_hurwitz(gains, p); });
    report("Hurwitz certificate", ts4, tp4, ca == cb);

    // One catalog sweep: each member is an independent closed-loop simulation.
    const auto cfg = find_catalog_entry("fig5b")->config();
    std::vector<Scenario> runs;
    for (double v : cfg.sweep->values) {
        Scenario sc = cfg.scenario;
        set_gain(sc.gains, cfg.sweep->gain, v);
        runs.push_back(sc);
    }
    std::vector<RunOutcome> ra, rb;
    const double ts5 = seconds([&] { ra = run_batch_serial(runs); });
    const double tp5 = seconds([&] { rb = run_batch(runs); });
    bool same = ra.size() == rb.size();
    for (std::size_t i = 0; same && i < ra.size(); ++i)
        same = ra[i].result.has_value() == rb[i].result.has_value()
               && (!ra[i].result || to_csv(*ra[i].result) == to_csv(*rb[i].result));
    report("sweep batch (fig5b)", ts5, tp5, same);
    return 0;
}
