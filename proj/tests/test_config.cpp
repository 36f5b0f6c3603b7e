#include "catch_amalgamated.hpp"

#include "scconv/catalog.hpp"
#include "scconv/config.hpp"

#include <cmath>
#include <cstdlib>
#include <random>
#include <set>

using namespace scconv;

namespace {

const char* kMinimal = R"(# minimal scenario
name = demo
gains.kappa1 = 10
gains.kappa2 = 1
gains.kappa3 = 500
gains.kappa4 = 1
gains.kappa5 = 1.8
schedule.x2star = [[0, 100]]
schedule.x4star = [[0, 50], [0.1, 70]]
schedule.il = [[0, 5]]
sim.horizon = 0.5
)";

std::string without(std::string text, const std::string& line_prefix) {
    const auto at = text.find(line_prefix);
    const auto end = text.find('\n', at);
    return text.erase(at, end - at + 1);
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("minimal config uses the defaults", "[config]") {
    const auto cfg = parse_config(kMinimal);
    CHECK(cfg.scenario.name == "demo");
    CHECK(cfg.scenario.params == ConverterParams::simulation());
    CHECK(cfg.scenario.gains == ControllerGains::simulation());
    CHECK(cfg.scenario.x4star.value_at(0.2) == 70);
    CHECK(cfg.scenario.horizon == 0.5);
    CHECK(cfg.scenario.model == ModelKind::averaged);
    CHECK_FALSE(cfg.sweep.has_value());
    CHECK(cfg.channel.empty());
}

TEST_CASE("serialization round-trips", "[config][property]") {
    const auto cfg = parse_config(kMinimal);
    CHECK(parse_config(serialize(cfg)) == cfg);
    CHECK(normalize(serialize(cfg)) == serialize(cfg));
    for (const auto& e : catalog()) {
        const auto c = e.config();
        CHECK(parse_config(serialize(c)) == c);
        CHECK(normalize(e.config_text) == serialize(c));
    }
    auto odd = parse_config(kMinimal);
    odd.scenario.params.R1 = 0.1 + 0.2;
    odd.scenario.gains.sigma2.kappa5 = 1.0 / 3.0;
    odd.scenario.gains.kappa5_mode = Kappa5Mode::scheduled;
    odd.scenario.model = ModelKind::switched;
    odd.scenario.dt = 2e-6;
    odd.sweep = SweepSpec{"kappa4", {0.1, 1e-7, 12345.678}};
    odd.channel = "x2";
    CHECK(parse_config(serialize(odd)) == odd);
}

TEST_CASE("number formatting round-trips", "[config][property]") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> e(-12, 12), m(-10, 10);
    for (int i = 0; i < 5000; ++i) {
        const double v = m(rng) * std::pow(10.0, e(rng));
        CHECK(std::strtod(format_number(v).c_str(), nullptr) == v);
    }
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(70) == "70");
}

TEST_CASE("missing required keys are named", "[config]") {
    CHECK(error_of(without(kMinimal, "gains.kappa3")).find("gains.kappa3") != std::string::npos);
    CHECK(error_of(without(kMinimal, "schedule.il")).find("schedule.il") != std::string::npos);
    CHECK(error_of(without(kMinimal, "sim.horizon")).find("sim.horizon") != std::string::npos);
    CHECK(error_of(without(kMinimal, "name")).find("name") != std::string::npos);
}

TEST_CASE("invalid values cite the violated invariant", "[config]") {
    std::string text = kMinimal;
    text.replace(text.find("kappa2 = 1"), 10, "kappa2 = -1");
    CHECK(error_of(text).find("kappa2 must be > 0") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "params.c1 = 0\n").find("parameters") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "sim.dt = nan\n").find("finite") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "sim.model = switched\n").find("switched mode") != std::string::npos);
    std::string sched = kMinimal;
    sched.replace(sched.find("[[0, 5]]"), 8, "[[0.1, 5]]");
    CHECK(error_of(sched).find("t = 0") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "sweep.gain = kappa2\nsweep.values = [1, -2]\n").find("sweep value -2")
          != std::string::npos);
}

TEST_CASE("malformed documents are rejected", "[config]") {
    CHECK(error_of(std::string(kMinimal) + "gains.kappa6 = 1\n").find("unknown key 'gains.kappa6'")
          != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "gains.kappa1 = 3\n").find("repeated key") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "just words\n").find("expected 'key = value'") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "sim.fsw =\n").find("missing value") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "params.preset = bench\n").find("params.preset") != std::string::npos);
    std::string sched = kMinimal;
    sched.replace(sched.find("[[0, 5]]"), 8, "[[0, 5]");
    CHECK(error_of(sched).find("malformed") != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "sweep.gain = kappa9\nsweep.values = [1]\n").find("sweep.gain")
          != std::string::npos);
    CHECK(error_of(std::string(kMinimal) + "sweep.gain = kappa2\n").find("sweep.values") != std::string::npos);
}

TEST_CASE("experimental preset replaces the parameters", "[config]") {
    const auto cfg = parse_config(std::string(kMinimal) + "params.preset = experimental\nparams.csc = 10\n");
    CHECK(cfg.scenario.params.L1 == ConverterParams::experimental().L1);
    CHECK(cfg.scenario.params.Csc == 10);
    auto c = parse_config(kMinimal);
    apply_experimental(c);
    CHECK(c.scenario.params == ConverterParams::experimental());
    CHECK(c.scenario.gains.sigma1 == ControllerGains::experimental().sigma1);
}

TEST_CASE("missing files are I/O errors", "[config]") {
    CHECK_THROWS_AS(load_config("/nonexistent/dir/none.cfg"), std::ios_base::failure);
}

TEST_CASE("gain access by name", "[config]") {
    ControllerGains g;
    set_gain(g, "kappa3", 250);
    CHECK(g.sigma1.kappa3 == 250);
    CHECK(get_gain(g, "kappa3") == 250);
    set_gain(g, "kappa5", 2.4);
    CHECK(g.sigma2.kappa5 == 2.4);
    CHECK_THROWS_AS(set_gain(g, "epsilon", 1), ConfigError);
    CHECK_THROWS_AS(get_gain(g, "kappa0"), ConfigError);
}

TEST_CASE("catalog entries", "[config][catalog]") {
    const auto& c = catalog();
    CHECK(c.size() >= 8);
    std::set<std::string> names;
    for (const auto& e : c) {
        names.insert(e.name);
        CHECK_FALSE(e.figure.empty());
        CHECK_FALSE(e.description.empty());
        CHECK_FALSE(e.expected.summary.empty());
        const auto cfg = e.config();
        CHECK(cfg.scenario.name == e.name);
        CHECK(cfg.scenario.check().empty());
        CHECK(cfg.scenario.gains == ControllerGains::simulation());
        if (cfg.sweep) {
            for (double v : cfg.sweep->values) {
                auto sc = cfg.scenario;
                set_gain(sc.gains, cfg.sweep->gain, v);
                CHECK(sc.check().empty());
            }
        }
    }
    CHECK(names.size() == c.size());
    for (const char* n : {"fig5a", "fig5b", "fig5c", "fig6a", "fig6b", "fig7", "fig8", "fig9"})
        CHECK(find_catalog_entry(n) != nullptr);
    CHECK(find_catalog_entry("fig5") == nullptr);
    CHECK(find_catalog_entry("fig5a_kappa1")->name == "fig5a_kappa1");
    CHECK(find_catalog_entry("nothing") == nullptr);
}
