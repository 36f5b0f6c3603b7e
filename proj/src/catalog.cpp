#include "scconv/catalog.hpp"

namespace scconv {

namespace {

// Shared by every entry: default gains, 10 us steps, 50 us samples.
constexpr std::string_view kCommon = R"(
gains.kappa1 = 10
gains.kappa2 = 1
gains.kappa3 = 500
gains.kappa4 = 1
gains.kappa5 = 1.8
sim.model = averaged
sim.dt = 1e-5
sim.sample_period = 5e-5
)";

std::string with_common(std::string_view specific) {
    return std::string(specific) + std::string(kCommon);
}

std::vector<CatalogEntry> build() {
    std::vector<CatalogEntry> c;

    const std::string x4_step = R"(schedule.x2star = [[0, 100]]
schedule.x4star = [[0, 50], [0.1, 70]]
schedule.il = [[0, 5]]
sim.horizon = 1.2
metrics.channel = x4
)";
    const std::string x2_step = R"(schedule.x2star = [[0, 100], [0.1, 120]]
schedule.x4star = [[0, 50]]
schedule.il = [[0, 5]]
sim.horizon = 1.5
metrics.channel = x2
)";

    {
        CatalogEntry e;
        e.name = "fig5a_kappa1";
        e.figure = "Fig. 5(a)";
        e.description = "x4 step 50->70 V at 0.1 s, IL = 5 A; sweep kappa1";
        e.config_text = with_common("name = fig5a_kappa1\n" + x4_step + "sweep.gain = kappa1\nsweep.values = [1, 2, 5, 10]\n");
        e.expected.summary = "base run settles within 40-100 ms at 70 +/- 0.5 V; overshoot increases with kappa1";
        e.expected.settling_window = std::array<double, 2>{0.040, 0.100};
        e.expected.final_value = 70.0;
        e.expected.final_tolerance = 0.5;
        e.expected.trend = "overshoot_increasing";
        c.push_back(e);
    }
    {
        CatalogEntry e;
        e.name = "fig5b_kappa2";
        e.figure = "Fig. 5(b)";
        e.description = "x4 step 50->70 V at 0.1 s, IL = 5 A; sweep kappa2";
        e.config_text = with_common("name = fig5b_kappa2\n" + x4_step + "sweep.gain = kappa2\nsweep.values = [0.5, 1, 2, 5, 10]\n");
        e.expected.summary = "overshoot falls below 1% as kappa2 grows (underdamped to overdamped)";
        e.expected.trend = "overshoot_crosses_below_1pct";
        c.push_back(e);
    }
    {
        CatalogEntry e;
        e.name = "fig5c_kappa3";
        e.figure = "Fig. 5(c)";
        e.description = "x4 step 50->70 V at 0.1 s, IL = 5 A; sweep kappa3";
        e.config_text = with_common("name = fig5c_kappa3\n" + x4_step + "sweep.gain = kappa3\nsweep.values = [50, 100, 250, 500]\n");
        e.expected.summary = "overshoot does not decrease as kappa3 grows";
        e.expected.trend = "overshoot_nondecreasing";
        c.push_back(e);
    }
    {
        CatalogEntry e;
        e.name = "fig6a_kappa4";
        e.figure = "Fig. 6(a)";
        e.description = "x2 step 100->120 V at 0.1 s, IL = 5 A; sweep kappa4";
        e.config_text = with_common("name = fig6a_kappa4\n" + x2_step + "sweep.gain = kappa4\nsweep.values = [0.1, 0.5, 1, 5, 10]\n");
        e.expected.summary = "steady-state x2 within [114, 121] V for every kappa4";
        e.expected.steady_x2_band = std::array<double, 2>{114.0, 121.0};
        c.push_back(e);
    }
    {
        CatalogEntry e;
        e.name = "fig6b_kappa5";
        e.figure = "Fig. 6(b)";
        e.description = "x2 step 100->120 V at 0.1 s, IL = 5 A; sweep kappa5";
        e.config_text = with_common("name = fig6b_kappa5\n" + x2_step + "sweep.gain = kappa5\nsweep.values = [0.9, 1.2, 1.8, 2.4, 2.7]\n");
        e.expected.summary = "steady-state x2 within [114, 121] V; |x2 error| decreases as kappa5 grows";
        e.expected.steady_x2_band = std::array<double, 2>{114.0, 121.0};
        e.expected.trend = "x2_error_decreasing";
        c.push_back(e);
    }
    {
        CatalogEntry e;
        e.name = "fig7_il";
        e.figure = "Fig. 7";
        e.description = "load current staircase 2.5, 5, -2.5, -5 A (1.2 s each) at x2* = 100 V, x4* = 50 V";
        e.config_text = with_common(R"(name = fig7_il
schedule.x2star = [[0, 100]]
schedule.x4star = [[0, 50]]
schedule.il = [[0, 2.5], [1.2, 5], [2.4, -2.5], [3.6, -5]]
init.x3 = 2.5
sim.horizon = 4.8
metrics.channel = x2
)");
        e.expected.summary = "x2 error grows with |IL| and takes the opposite sign of IL; phi grows with |IL|";
        e.expected.trend = "phi_increasing_with_abs_il";
        c.push_back(e);
    }
    const std::string refs = R"(schedule.x2star = [[0, 100]]
schedule.x4star = [[0, 45], [0.15, 50], [0.3, 55], [0.45, 60]]
schedule.il = [[0, 5], [0.6, -5], [1, 0], [1.4, 5]]
init.x4 = 45
sim.horizon = 2.6
metrics.channel = x4
)";
    {
        CatalogEntry e;
        e.name = "fig8_refs";
        e.figure = "Fig. 8";
        e.description = "x4* staircase 45/50/55/60 V, then IL = 5, -5, 0, 5 A at x2* = 100 V";
        e.config_text = with_common("name = fig8_refs\n" + refs);
        e.expected.summary = "x4 holds the 45/50/55/60 V plateaus; x2 stays regulated through the load steps";
        e.expected.plateau_levels = {45.0, 50.0, 55.0, 60.0};
        e.expected.trend = "x4_plateaus";
        c.push_back(e);
    }
    {
        CatalogEntry e;
        e.name = "fig9_x5";
        e.figure = "Fig. 9";
        e.description = "same run as fig8_refs; supercapacitor voltage x5 discharging and recharging";
        e.config_text = with_common("name = fig9_x5\n" + refs);
        e.expected.summary = "x5 falls while IL > 0 and rises while IL < 0";
        e.expected.trend = "x5_follows_il";
        c.push_back(e);
    }
    return c;
}

} // namespace

const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = build();
    return entries;
}

const CatalogEntry* find_catalog_entry(std::string_view name) {
    const CatalogEntry* hit = nullptr;
    for (const auto& e : catalog()) {
        if (e.name == name) return &e;
        if (e.name.compare(0, name.size(), name) == 0 && !name.empty()) {
            if (hit) return nullptr;
            hit = &e;
        }
    }
    return hit;
}

void apply_experimental(ScenarioConfig& cfg) {
    const auto bench = ControllerGains::experimental();
    cfg.scenario.params = ConverterParams::experimental();
    cfg.scenario.gains.sigma1 = bench.sigma1;
    cfg.scenario.gains.sigma2.kappa4 = bench.sigma2.kappa4;
    cfg.scenario.gains.sigma2.kappa5 = bench.sigma2.kappa5;
}

} // namespace scconv
