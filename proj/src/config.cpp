#include "scconv/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace scconv {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, std::string_view text) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw ConfigError(key + ": expected a finite number, got '" + std::string(text) + "'");
    return v;
}

nlohmann::json parse_json(const std::string& key, std::string_view text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
        throw ConfigError(key + ": malformed list '" + std::string(text) + "'");
    }
}

double json_number(const std::string& key, const nlohmann::json& j) {
    if (!j.is_number()) throw ConfigError(key + ": list entries must be numbers");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(key + ": list entries must be finite");
    return v;
}

Schedule parse_schedule(const std::string& key, std::string_view text) {
    const auto j = parse_json(key, text);
    if (!j.is_array() || j.empty()) throw ConfigError(key + ": expected [[time, value], ...]");
    std::vector<Breakpoint> pts;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw ConfigError(key + ": each breakpoint must be [time, value]");
        pts.push_back({json_number(key, e[0]), json_number(key, e[1])});
    }
    Schedule s(std::move(pts));
    if (auto err = s.check(); !err.empty()) throw ConfigError(key + ": " + err);
    return s;
}

std::vector<double> parse_values(const std::string& key, std::string_view text) {
    const auto j = parse_json(key, text);
    if (!j.is_array() || j.empty()) throw ConfigError(key + ": expected a non-empty list [v, ...]");
    std::vector<double> out;
    for (const auto& e : j) out.push_back(json_number(key, e));
    return out;
}

bool valid_name(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

using Setter = std::function<void(ScenarioConfig&, const std::string& key, std::string_view value)>;

Setter number(double Scenario::*field) {
    return [field](ScenarioConfig& c, const std::string& k, std::string_view v) {
        c.scenario.*field = parse_number(k, v);
    };
}

Setter param(double ConverterParams::*field) {
    return [field](ScenarioConfig& c, const std::string& k, std::string_view v) {
        c.scenario.params.*field = parse_number(k, v);
    };
}

Setter gain2(double Sigma2Gains::*field) {
    return [field](ScenarioConfig& c, const std::string& k, std::string_view v) {
        c.scenario.gains.sigma2.*field = parse_number(k, v);
    };
}

Setter gain(double ControllerGains::*field) {
    return [field](ScenarioConfig& c, const std::string& k, std::string_view v) {
        c.scenario.gains.*field = parse_number(k, v);
    };
}

Setter init(double PlantState::*field) {
    return [field](ScenarioConfig& c, const std::string& k, std::string_view v) {
        c.scenario.x0.*field = parse_number(k, v);
    };
}

Setter kappa(const char* name) {
    return [name](ScenarioConfig& c, const std::string& k, std::string_view v) {
        set_gain(c.scenario.gains, name, parse_number(k, v));
    };
}

Setter schedule(Schedule Scenario::*field) {
    return [field](ScenarioConfig& c, const std::string& k, std::string_view v) {
        c.scenario.*field = parse_schedule(k, v);
    };
}

/// Key table in canonical order. params.preset is handled before the table is applied.
const std::vector<std::pair<std::string, Setter>>& key_table() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"name",
         [](ScenarioConfig& c, const std::string& k, std::string_view v) {
             if (!valid_name(v)) throw ConfigError(k + ": use letters, digits, '_', '-' or '.'");
             c.scenario.name = std::string(v);
         }},
        {"params.preset", [](ScenarioConfig&, const std::string&, std::string_view) {}},
        {"params.l1", param(&ConverterParams::L1)},
        {"params.l2", param(&ConverterParams::L2)},
        {"params.c1", param(&ConverterParams::C1)},
        {"params.c2", param(&ConverterParams::C2)},
        {"params.csc", param(&ConverterParams::Csc)},
        {"params.r1", param(&ConverterParams::R1)},
        {"params.r2", param(&ConverterParams::R2)},
        {"params.g", param(&ConverterParams::G)},
        {"params.gsc", param(&ConverterParams::Gsc)},
        {"gains.kappa1", kappa("kappa1")},
        {"gains.kappa2", kappa("kappa2")},
        {"gains.kappa3", kappa("kappa3")},
        {"gains.kappa4", kappa("kappa4")},
        {"gains.kappa5", kappa("kappa5")},
        {"gains.kappa5_mode",
         [](ScenarioConfig& c, const std::string& k, std::string_view v) {
             if (v == "constant") c.scenario.gains.kappa5_mode = Kappa5Mode::constant;
             else if (v == "scheduled") c.scenario.gains.kappa5_mode = Kappa5Mode::scheduled;
             else throw ConfigError(k + ": expected constant or scheduled");
         }},
        {"gains.epsilon", gain2(&Sigma2Gains::epsilon)},
        {"gains.x1_min", gain2(&Sigma2Gains::x1_min)},
        {"gains.x1_max", gain2(&Sigma2Gains::x1_max)},
        {"gains.u_min", gain2(&Sigma2Gains::u_min)},
        {"gains.u_max", gain2(&Sigma2Gains::u_max)},
        {"gains.hysteresis_band", gain(&ControllerGains::hysteresis_band)},
        {"gains.x2_floor", gain(&ControllerGains::x2_floor)},
        {"gains.denom_floor", gain(&ControllerGains::denom_floor)},
        {"schedule.x2star", schedule(&Scenario::x2star)},
        {"schedule.x4star", schedule(&Scenario::x4star)},
        {"schedule.il", schedule(&Scenario::il)},
        {"init.x1", init(&PlantState::x1)},
        {"init.x2", init(&PlantState::x2)},
        {"init.x3", init(&PlantState::x3)},
        {"init.x4", init(&PlantState::x4)},
        {"init.x5", init(&PlantState::x5)},
        {"sim.model",
         [](ScenarioConfig& c, const std::string& k, std::string_view v) {
             if (v == "averaged") c.scenario.model = ModelKind::averaged;
             else if (v == "switched") c.scenario.model = ModelKind::switched;
             else throw ConfigError(k + ": expected averaged or switched");
         }},
        {"sim.dt", number(&Scenario::dt)},
        {"sim.fsw", number(&Scenario::fsw)},
        {"sim.horizon", number(&Scenario::horizon)},
        {"sim.sample_period", number(&Scenario::sample_period)},
        {"sweep.gain",
         [](ScenarioConfig& c, const std::string& k, std::string_view v) {
             if (v != "kappa1" && v != "kappa2" && v != "kappa3" && v != "kappa4" && v != "kappa5")
                 throw ConfigError(k + ": expected one of kappa1 .. kappa5");
             if (!c.sweep) c.sweep.emplace();
             c.sweep->gain = std::string(v);
         }},
        {"sweep.values",
         [](ScenarioConfig& c, const std::string& k, std::string_view v) {
             if (!c.sweep) c.sweep.emplace();
             c.sweep->values = parse_values(k, v);
         }},
        {"metrics.channel",
         [](ScenarioConfig& c, const std::string& k, std::string_view v) {
             if (v != "x2" && v != "x4") throw ConfigError(k + ": expected x2 or x4");
             c.channel = std::string(v);
         }},
    };
    return table;
}

const std::vector<std::string>& required_keys() {
    static const std::vector<std::string> keys = {
        "name",         "gains.kappa1",    "gains.kappa2",    "gains.kappa3", "gains.kappa4",
        "gains.kappa5", "schedule.x2star", "schedule.x4star", "schedule.il",  "sim.horizon",
    };
    return keys;
}

} // namespace

void set_gain(ControllerGains& g, std::string_view name, double value) {
    if (name == "kappa1") g.sigma1.kappa1 = value;
    else if (name == "kappa2") g.sigma1.kappa2 = value;
    else if (name == "kappa3") g.sigma1.kappa3 = value;
    else if (name == "kappa4") g.sigma2.kappa4 = value;
    else if (name == "kappa5") g.sigma2.kappa5 = value;
    else throw ConfigError("unknown gain '" + std::string(name) + "' (expected kappa1 .. kappa5)");
}

double get_gain(const ControllerGains& g, std::string_view name) {
    if (name == "kappa1") return g.sigma1.kappa1;
    if (name == "kappa2") return g.sigma1.kappa2;
    if (name == "kappa3") return g.sigma1.kappa3;
    if (name == "kappa4") return g.sigma2.kappa4;
    if (name == "kappa5") return g.sigma2.kappa5;
    throw ConfigError("unknown gain '" + std::string(name) + "' (expected kappa1 .. kappa5)");
}

std::string format_number(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

ScenarioConfig parse_config(std::string_view text) {
    std::map<std::string, std::string> entries;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view l = line;
        if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
        l = trim(l);
        if (l.empty()) continue;
        const auto eq = l.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key(trim(l.substr(0, eq)));
        const std::string value(trim(l.substr(eq + 1)));
        if (value.empty()) throw ConfigError(key + ": missing value");
        if (!entries.emplace(key, value).second) throw ConfigError(key + ": repeated key");
    }

    const auto& table = key_table();
    for (const auto& [key, value] : entries) {
        const bool known = std::any_of(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
        if (!known) throw ConfigError("unknown key '" + key + "'");
    }
    for (const auto& key : required_keys())
        if (!entries.count(key)) throw ConfigError("missing required key '" + key + "'");

    ScenarioConfig cfg;
    if (auto it = entries.find("params.preset"); it != entries.end()) {
        if (it->second == "simulation") cfg.scenario.params = ConverterParams::simulation();
        else if (it->second == "experimental") cfg.scenario.params = ConverterParams::experimental();
        else throw ConfigError("params.preset: expected simulation or experimental");
    }
    for (const auto& [key, set] : table) {
        if (auto it = entries.find(key); it != entries.end()) set(cfg, key, it->second);
    }

    if (cfg.sweep) {
        if (cfg.sweep->gain.empty()) throw ConfigError("missing required key 'sweep.gain'");
        if (cfg.sweep->values.empty()) throw ConfigError("missing required key 'sweep.values'");
    }
    if (auto err = cfg.scenario.check(); !err.empty()) throw ConfigError(err);
    if (cfg.sweep) {
        for (double v : cfg.sweep->values) {
            ControllerGains g = cfg.scenario.gains;
            set_gain(g, cfg.sweep->gain, v);
            if (auto err = validate(g, cfg.scenario.params); !err.empty())
                throw ConfigError("sweep value " + format_number(v) + ": " + err);
        }
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

std::string schedule_text(const Schedule& s) {
    std::string out = "[";
    for (std::size_t i = 0; i < s.points().size(); ++i) {
        if (i) out += ", ";
        out += "[" + format_number(s.points()[i].time) + ", " + format_number(s.points()[i].value) + "]";
    }
    return out + "]";
}

} // namespace

std::string serialize(const ScenarioConfig& cfg) {
    const auto& sc = cfg.scenario;
    const auto& p = sc.params;
    const auto& g = sc.gains;
    std::ostringstream os;
    auto kv = [&](const char* k, const std::string& v) { os << k << " = " << v << '\n'; };
    auto num = [&](const char* k, double v) { kv(k, format_number(v)); };

    kv("name", sc.name);
    num("params.l1", p.L1);
    num("params.l2", p.L2);
    num("params.c1", p.C1);
    num("params.c2", p.C2);
    num("params.csc", p.Csc);
    num("params.r1", p.R1);
    num("params.r2", p.R2);
    num("params.g", p.G);
    num("params.gsc", p.Gsc);
    num("gains.kappa1", g.sigma1.kappa1);
    num("gains.kappa2", g.sigma1.kappa2);
    num("gains.kappa3", g.sigma1.kappa3);
    num("gains.kappa4", g.sigma2.kappa4);
    num("gains.kappa5", g.sigma2.kappa5);
    kv("gains.kappa5_mode", std::string(to_string(g.kappa5_mode)));
    num("gains.epsilon", g.sigma2.epsilon);
    num("gains.x1_min", g.sigma2.x1_min);
    num("gains.x1_max", g.sigma2.x1_max);
    num("gains.u_min", g.sigma2.u_min);
    num("gains.u_max", g.sigma2.u_max);
    num("gains.hysteresis_band", g.hysteresis_band);
    num("gains.x2_floor", g.x2_floor);
    num("gains.denom_floor", g.denom_floor);
    kv("schedule.x2star", schedule_text(sc.x2star));
    kv("schedule.x4star", schedule_text(sc.x4star));
    kv("schedule.il", schedule_text(sc.il));
    num("init.x1", sc.x0.x1);
    num("init.x2", sc.x0.x2);
    num("init.x3", sc.x0.x3);
    num("init.x4", sc.x0.x4);
    num("init.x5", sc.x0.x5);
    kv("sim.model", std::string(to_string(sc.model)));
    num("sim.dt", sc.dt);
    num("sim.fsw", sc.fsw);
    num("sim.horizon", sc.horizon);
    num("sim.sample_period", sc.sample_period);
    if (cfg.sweep) {
        kv("sweep.gain", cfg.sweep->gain);
        std::string values = "[";
        for (std::size_t i = 0; i < cfg.sweep->values.size(); ++i)
            values += (i ? ", " : "") + format_number(cfg.sweep->values[i]);
        kv("sweep.values", values + "]");
    }
    if (!cfg.channel.empty()) kv("metrics.channel", cfg.channel);
    return os.str();
}

std::string normalize(std::string_view text) {
    return serialize(parse_config(text));
}

} // namespace scconv
