#include "scconv/cli.hpp"

#include "scconv/analysis.hpp"
#include "scconv/catalog.hpp"
#include "scconv/checks.hpp"
#include "scconv/config.hpp"
#include "scconv/parallel.hpp"
#include "scconv/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace scconv {

namespace fs = std::filesystem;

std::string sweep_run_name(const std::string& scenario, const std::string& gain, double value) {
    return scenario + "_" + gain + "_" + format_number(value);
}

namespace {

struct Source {
    std::string config_path;
    std::string catalog_name;
    std::string params = "simulation";
    std::string model;
};

fs::path resolve_out(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("CONVERTER_SIM_OUT"); env && *env) return env;
    return "out";
}

ScenarioConfig load(const Source& src) {
    ScenarioConfig cfg;
    if (!src.catalog_name.empty()) {
        const auto* e = find_catalog_entry(src.catalog_name);
        if (!e) throw ConfigError("no unique catalog entry matches '" + src.catalog_name + "'");
        cfg = e->config();
    } else if (!src.config_path.empty()) {
        cfg = load_config(src.config_path);
    } else {
        throw ConfigError("give a config file or --catalog NAME");
    }
    if (src.params == "experimental") apply_experimental(cfg);
    if (src.model == "switched") {
        cfg.scenario.model = ModelKind::switched;
        cfg.scenario.dt = std::min(cfg.scenario.dt, 1.0 / (50.0 * cfg.scenario.fsw));
    } else if (src.model == "averaged") {
        cfg.scenario.model = ModelKind::averaged;
    }
    if (auto e = cfg.scenario.check(); !e.empty()) throw ConfigError(e);
    return cfg;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::ios_base::failure("cannot write '" + path.string() + "'");
    f << content;
    f.close();
    if (!f) throw std::ios_base::failure("failed writing '" + path.string() + "'");
}

void prepare_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::ios_base::failure("cannot create output directory '" + dir.string() + "'");
}

ScenarioMetrics emit(const Scenario& sc, const std::string& channel, const SimResult& r, const fs::path& dir) {
    const auto m = scenario_metrics(sc, r, channel);
    std::optional<double> residual;
    if (r.model == ModelKind::averaged) {
        try {
            residual = passivity_residual_sigma2(r, sc.params);
        } catch (const TooCoarse&) {
        }
    }
    write_file(dir / (sc.name + ".csv"), to_csv(r));
    write_file(dir / (sc.name + ".metrics.json"), metrics_document(sc.name, m, residual));
    return m;
}

int do_run(const ScenarioConfig& cfg, const fs::path& dir, std::ostream& out) {
    prepare_dir(dir);
    const auto r = simulate(cfg.scenario);
    const auto m = emit(cfg.scenario, cfg.channel, r, dir);
    out << cfg.scenario.name << ": " << r.size() << " samples, " << m.channel << " settling "
        << m.response.settling_time_2pct << " s" << (m.response.settled ? "" : " (unsettled)") << ", overshoot "
        << m.response.overshoot_pct << " %, written to " << dir.string() << "\n";
    return kExitOk;
}

int do_sweep(const ScenarioConfig& cfg, const std::string& gain, const std::vector<double>& values, int jobs,
             const fs::path& dir, std::ostream& out, std::ostream& err) {
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    std::vector<Scenario> runs;
    for (double v : values) {
        Scenario sc = cfg.scenario;
        set_gain(sc.gains, gain, v);
        if (auto e = sc.check(); !e.empty()) throw ConfigError(gain + " = " + format_number(v) + ": " + e);
        sc.name = sweep_run_name(cfg.scenario.name, gain, v);
        runs.push_back(std::move(sc));
    }
    prepare_dir(dir);
    const auto outcomes = run_batch(runs, jobs);

    std::vector<SweepRow> rows;
    int code = kExitOk;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        SweepRow row;
        row.value = values[i];
        row.run_name = runs[i].name;
        if (outcomes[i].result) {
            row.metrics = emit(runs[i], cfg.channel, *outcomes[i].result, dir);
            out << row.run_name << ": overshoot " << row.metrics->response.overshoot_pct << " %, settling "
                << row.metrics->response.settling_time_2pct << " s, steady x2 " << row.metrics->steady_x2 << " V\n";
        } else {
            row.error = outcomes[i].error;
            row.guard_trip = outcomes[i].guard_trip;
            err << row.run_name << ": " << row.error << "\n";
            code = std::max(code, outcomes[i].guard_trip ? int(kExitGuardTrip) : int(kExitConfigError));
        }
        rows.push_back(std::move(row));
    }
    write_file(dir / (cfg.scenario.name + ".sweep.json"), sweep_summary_document(cfg.scenario.name, gain, rows));
    return code;
}

int do_check(const CheckOptions& opt, std::ostream& out) {
    bool all = true;
    for (const auto& c : run_invariant_suite(ConverterParams::simulation(), opt)) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.value << " (limit " << c.limit << "; "
            << c.detail << ")\n";
        all = all && c.pass;
    }
    return all ? kExitOk : kExitCheckFailed;
}

void add_source(CLI::App* cmd, Source& src) {
    cmd->add_option("config", src.config_path, "Scenario config file");
    cmd->add_option("--catalog", src.catalog_name, "Use a built-in catalog entry instead of a file");
    cmd->add_option("--params", src.params, "Parameter set")->check(CLI::IsMember({"simulation", "experimental"}));
    cmd->add_option("--model", src.model, "Override the plant model")->check(CLI::IsMember({"averaged", "switched"}));
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Buck-boost converter with supercapacitor storage: closed-loop simulation and checks",
                 "converter-sim"};
    app.require_subcommand(1);

    Source src;
    std::string out_flag;
    int jobs = 0;

    auto* run = app.add_subcommand("run", "Simulate one scenario and write <name>.csv and <name>.metrics.json");
    add_source(run, src);
    run->add_option("-o,--out", out_flag, "Output directory (default: $CONVERTER_SIM_OUT or ./out)");

    std::string gain;
    std::vector<double> values;
    auto* sweep = app.add_subcommand("sweep", "Run one scenario per gain value plus a summary JSON");
    add_source(sweep, src);
    sweep->add_option("--gain", gain, "kappa1 .. kappa5 (default: the config's sweep.gain)");
    sweep->add_option("--values", values, "Comma-separated values (default: the config's sweep.values)")
        ->delimiter(',');
    sweep->add_option("-j,--jobs", jobs, "Concurrent runs (0: all cores)")->check(CLI::NonNegativeNumber);
    sweep->add_option("-o,--out", out_flag, "Output directory (default: $CONVERTER_SIM_OUT or ./out)");

    auto* cat = app.add_subcommand("catalog", "Built-in scenarios");
    cat->require_subcommand(1);
    auto* cat_list = cat->add_subcommand("list", "Names, figures and descriptions");
    std::string entry;
    auto* cat_dump = cat->add_subcommand("dump", "Print the config of an entry");
    cat_dump->add_option("name", entry)->required();
    auto* cat_run = cat->add_subcommand("run", "Run an entry and its sweep");
    cat_run->add_option("name", entry)->required();
    cat_run->add_option("--params", src.params, "Parameter set")
        ->check(CLI::IsMember({"simulation", "experimental"}));
    cat_run->add_option("-j,--jobs", jobs, "Concurrent runs (0: all cores)")->check(CLI::NonNegativeNumber);
    cat_run->add_option("-o,--out", out_flag, "Output directory (default: $CONVERTER_SIM_OUT or ./out)");

    CheckOptions copt;
    auto* check = app.add_subcommand("check", "Run the structural invariant suite");
    check->add_option("--seed", copt.seed, "Random seed");
    check->add_option("--samples", copt.plant_samples, "Random plant states")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        const auto dir = resolve_out(out_flag);
        if (*run) return do_run(load(src), dir, out);
        if (*sweep) {
            const auto cfg = load(src);
            const std::string g = !gain.empty() ? gain : (cfg.sweep ? cfg.sweep->gain : "");
            const auto v = !values.empty() ? values : (cfg.sweep ? cfg.sweep->values : std::vector<double>{});
            if (g.empty()) throw ConfigError("missing sweep gain: pass --gain or set sweep.gain");
            get_gain(cfg.scenario.gains, g);
            return do_sweep(cfg, g, v, jobs, dir, out, err);
        }
        if (*cat_list) {
            for (const auto& e : catalog())
                out << e.name << "  [" << e.figure << "]  " << e.description << "\n";
            return kExitOk;
        }
        if (*cat_dump) {
            const auto* e = find_catalog_entry(entry);
            if (!e) throw ConfigError("no unique catalog entry matches '" + entry + "'");
            out << serialize(e->config());
            return kExitOk;
        }
        if (*cat_run) {
            src.catalog_name = entry;
            const auto cfg = load(src);
            int code = do_run(cfg, dir, out);
            if (cfg.sweep) code = std::max(code, do_sweep(cfg, cfg.sweep->gain, cfg.sweep->values, jobs, dir, out, err));
            return code;
        }
        if (*check) return do_check(copt, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const SimError& e) {
        err << "simulation stopped: " << e.what() << "\n";
        return kExitGuardTrip;
    } catch (const std::ios_base::failure& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitConfigError;
}

} // namespace scconv
