#include "scconv/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace scconv {

Schedule::Schedule(std::vector<Breakpoint> points) : points_(std::move(points)) {}

double Schedule::value_at(double t) const {
    if (points_.empty()) return 0.0;
    // Last breakpoint with time <= t; the first one holds for earlier times as well.
    auto it = std::upper_bound(points_.begin(), points_.end(), t,
                               [](double v, const Breakpoint& b) { return v < b.time; });
    if (it == points_.begin()) return points_.front().value;
    return std::prev(it)->value;
}

std::string Schedule::check() const {
    if (points_.empty()) return "schedule is empty";
    if (points_.front().time != 0.0) return "first breakpoint must be at t = 0";
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (!(points_[i].time > points_[i - 1].time)) return "breakpoints must be strictly increasing in time";
    }
    for (const auto& b : points_) {
        if (!std::isfinite(b.time) || !std::isfinite(b.value)) return "breakpoint is not finite";
    }
    return {};
}

std::string_view to_string(ModelKind m) {
    return m == ModelKind::averaged ? "averaged" : "switched";
}

std::string Scenario::check() const {
    if (!params.valid()) return "converter parameters must all be finite and > 0";
    if (auto e = validate(gains, params); !e.empty()) return e;
    if (auto e = x2star.check(); !e.empty()) return "x2star " + e;
    if (auto e = x4star.check(); !e.empty()) return "x4star " + e;
    if (auto e = il.check(); !e.empty()) return "il " + e;
    for (const auto& b : x2star.points())
        if (!(b.value > 0.0)) return "x2star values must be > 0";
    for (const auto& b : x4star.points())
        if (!(b.value > 0.0)) return "x4star values must be > 0";
    if (!(dt > 0.0)) return "dt must be > 0";
    if (!(horizon > 0.0)) return "horizon must be > 0";
    if (!(sample_period > 0.0)) return "sample_period must be > 0";
    if (!(fsw > 0.0)) return "fsw must be > 0";
    if (model == ModelKind::switched && dt > 1.0 / (50.0 * fsw) * (1.0 + 1e-12))
        return "switched mode requires dt <= 1/(50*fsw)";
    for (double v : x0.as_array())
        if (!std::isfinite(v)) return "initial state must be finite";
    return {};
}

const std::vector<double>& SimResult::column(std::string_view name) const {
    if (name == "t") return t;
    if (name == "x1") return x1;
    if (name == "x2") return x2;
    if (name == "x3") return x3;
    if (name == "x4") return x4;
    if (name == "x5") return x5;
    if (name == "u1") return u1;
    if (name == "u2") return u2;
    if (name == "x3ref") return x3ref;
    if (name == "x1ref") return x1ref;
    if (name == "kappa5") return kappa5;
    if (name == "il") return il;
    if (name == "x2star") return x2star;
    if (name == "x4star") return x4star;
    throw std::out_of_range("unknown column " + std::string(name));
}

namespace {

void put_double(std::string& out, double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, end);
}

} // namespace

std::string to_csv(const SimResult& r) {
    std::string out;
    out.reserve(r.size() * 16 * 20 + 128);
    out.append(kCsvHeader);
    out.push_back('\n');
    for (std::size_t i = 0; i < r.size(); ++i) {
        for (const auto* col : {&r.t, &r.x1, &r.x2, &r.x3, &r.x4, &r.x5, &r.u1, &r.u2, &r.x3ref, &r.x1ref,
                                &r.kappa5, &r.il, &r.x2star, &r.x4star}) {
            put_double(out, (*col)[i]);
            out.push_back(',');
        }
        out.push_back(r.sat1[i] ? '1' : '0');
        out.push_back(',');
        out.push_back(r.sat2[i] ? '1' : '0');
        out.push_back('\n');
    }
    return out;
}

void write_csv(const SimResult& r, std::ostream& os) {
    os << to_csv(r);
}

std::vector<double> sample_times(const Scenario& sc) {
    const auto n = static_cast<std::size_t>(std::floor(sc.horizon / sc.sample_period * (1.0 + 1e-12)));
    std::vector<double> ts(n + 1);
    for (std::size_t k = 0; k <= n; ++k) ts[k] = static_cast<double>(k) * sc.sample_period;
    return ts;
}

int pwm_switch(double duty, double phase) {
    const double carrier = phase < 0.5 ? 2.0 * phase : 2.0 - 2.0 * phase;
    return duty > carrier ? 1 : 0;
}

namespace {

using PlantVec = std::array<double, 5>;
using LoopVec = std::array<double, 7>; // x1..x5, x3ref, x1ref

PlantState plant_of(const LoopVec& v) { return {v[0], v[1], v[2], v[3], v[4]}; }

PlantVec plant_field(const PlantVec& y, const ControlInput& u, double il, const ConverterParams& p) {
    return derivative(PlantState::from_array(y), u, il, p).as_array();
}

/// Sorted union of time lists, merging entries closer than tol.
std::vector<double> merge_times(std::vector<double> times, double tol) {
    std::sort(times.begin(), times.end());
    std::vector<double> out;
    for (double t : times) {
        if (out.empty() || t - out.back() > tol) out.push_back(t);
    }
    return out;
}

std::vector<double> breakpoint_times(const Scenario& sc) {
    std::vector<double> ts;
    for (const auto* s : {&sc.x2star, &sc.x4star, &sc.il}) {
        for (const auto& b : s->points()) {
            if (b.time > 0.0 && b.time < sc.horizon) ts.push_back(b.time);
        }
    }
    return ts;
}

/// Appends samples and tracks saturation intervals / positivity transitions.
class Recorder {
public:
    Recorder(const Scenario& sc, std::size_t expected) {
        r_.name = sc.name;
        r_.model = sc.model;
        r_.dt = sc.dt;
        for (auto* col : {&r_.t, &r_.x1, &r_.x2, &r_.x3, &r_.x4, &r_.x5, &r_.u1, &r_.u2, &r_.x3ref, &r_.x1ref,
                          &r_.kappa5, &r_.il, &r_.x2star, &r_.x4star})
            col->reserve(expected);
        r_.sat1.reserve(expected);
        r_.sat2.reserve(expected);
    }

    void sample(double t, const PlantState& x, const ControllerState& cs, const ControlInput& u, double k5, bool s1,
                bool s2, double il, const References& refs) {
        r_.t.push_back(t);
        r_.x1.push_back(x.x1);
        r_.x2.push_back(x.x2);
        r_.x3.push_back(x.x3);
        r_.x4.push_back(x.x4);
        r_.x5.push_back(x.x5);
        r_.u1.push_back(u.u1);
        r_.u2.push_back(u.u2);
        r_.x3ref.push_back(cs.x3ref);
        r_.x1ref.push_back(cs.x1ref);
        r_.kappa5.push_back(k5);
        r_.il.push_back(il);
        r_.x2star.push_back(refs.x2star);
        r_.x4star.push_back(refs.x4star);
        r_.sat1.push_back(s1 ? 1 : 0);
        r_.sat2.push_back(s2 ? 1 : 0);

        check_positive(t, "x2", x.x2, bad_[0]);
        check_positive(t, "x4", x.x4, bad_[1]);
        check_positive(t, "x5", x.x5, bad_[2]);
    }

    /// Called at every control update with the current saturation state.
    void saturation(double t, bool s1, bool s2) {
        track(1, t, s1, open_[0], start_[0]);
        track(2, t, s2, open_[1], start_[1]);
    }

    SimResult finish(double t_end) {
        for (int ch = 0; ch < 2; ++ch) {
            if (open_[ch]) r_.saturation.push_back({ch + 1, start_[ch], t_end});
        }
        std::sort(r_.saturation.begin(), r_.saturation.end(),
                  [](const auto& a, const auto& b) { return a.start < b.start || (a.start == b.start && a.channel < b.channel); });
        return std::move(r_);
    }

private:
    void check_positive(double t, const char* name, double v, bool& bad) {
        const bool now_bad = !(v > 0.0);
        if (now_bad && !bad) r_.positivity_events.push_back({t, name, v});
        bad = now_bad;
    }

    void track(int channel, double t, bool active, bool& open, double& start) {
        if (active && !open) {
            open = true;
            start = t;
        } else if (!active && open) {
            open = false;
            r_.saturation.push_back({channel, start, t});
        }
    }

    SimResult r_;
    std::array<bool, 3> bad_{};
    std::array<bool, 2> open_{};
    std::array<double, 2> start_{};
};

void require_valid(const Scenario& sc, ModelKind expected) {
    if (auto e = sc.check(); !e.empty()) throw std::invalid_argument("invalid scenario '" + sc.name + "': " + e);
    if (sc.model != expected)
        throw std::invalid_argument("scenario '" + sc.name + "' is not in " + std::string(to_string(expected)) + " mode");
}

References refs_at(const Scenario& sc, double t) {
    return {sc.x2star.value_at(t), sc.x4star.value_at(t)};
}

} // namespace

PlantState integrate_open_loop(const PlantState& x0, const ControlInput& duty, double il, const ConverterParams& p,
                               ModelKind model, double fsw, double duration, double dt_max) {
    auto advance = [&](PlantVec y, double len, const ControlInput& u) {
        if (len <= 0.0) return y;
        const auto n = static_cast<long>(std::ceil(len / dt_max - 1e-9));
        const double h = len / static_cast<double>(std::max(1L, n));
        auto f = [&](const PlantVec& v) { return plant_field(v, u, il, p); };
        for (long k = 0; k < std::max(1L, n); ++k) y = rk4_step(f, y, h);
        return y;
    };

    PlantVec y = x0.as_array();
    if (model == ModelKind::averaged) return PlantState::from_array(advance(y, duration, duty));

    const double period = 1.0 / fsw;
    double t = 0.0;
    while (duration - t > 1e-15) {
        const double t_end = std::min(t + period, duration);
        std::vector<double> cuts{t, t_end};
        for (double d : {duty.u1, duty.u2}) {
            const double dc = std::clamp(d, 0.0, 1.0);
            for (double e : {t + 0.5 * dc * period, t + period - 0.5 * dc * period})
                if (e > t && e < t_end) cuts.push_back(e);
        }
        cuts = merge_times(cuts, 1e-15);
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double phase = (0.5 * (cuts[i] + cuts[i + 1]) - t) / period;
            const ControlInput s{static_cast<double>(pwm_switch(duty.u1, phase)),
                                 static_cast<double>(pwm_switch(duty.u2, phase))};
            y = advance(y, cuts[i + 1] - cuts[i], s);
        }
        t = t_end;
    }
    return PlantState::from_array(y);
}

SimResult simulate_averaged(const Scenario& sc) {
    require_valid(sc, ModelKind::averaged);
    const auto& p = sc.params;
    const auto& g = sc.gains;

    const auto samples = sample_times(sc);
    const double tol = 1e-6 * sc.dt;
    std::vector<double> events = samples;
    for (double b : breakpoint_times(sc)) events.push_back(b);
    events.push_back(sc.horizon);
    events = merge_times(std::move(events), tol);

    Recorder rec(sc, samples.size());
    References refs = refs_at(sc, 0.0);
    double il = sc.il.value_at(0.0);
    ControllerState cs = initial_controller_state(sc.x0, refs, il, g, p);
    LoopVec y{sc.x0.x1, sc.x0.x2, sc.x0.x3, sc.x0.x4, sc.x0.x5, cs.x3ref, cs.x1ref};
    double k5 = active_kappa5(sc.x0, cs, g, p);

    std::size_t next_sample = 0;
    for (std::size_t ei = 0; ei < events.size(); ++ei) {
        const double t = events[ei];
        try {
            const References new_refs = refs_at(sc, t);
            if (new_refs.x2star != refs.x2star) {
                // x1ref tracks -kappa5 (x2 - x2star); a reference step shifts it by kappa5 * delta.
                y[6] += k5 * (new_refs.x2star - refs.x2star);
            }
            refs = new_refs;
            il = sc.il.value_at(t);

            cs.x3ref = y[5];
            cs.x1ref = y[6];
            if (g.kappa5_mode == Kappa5Mode::scheduled)
                cs.kappa5_sign = update_kappa5_sign(y[0], cs.kappa5_sign, g.hysteresis_band);
            k5 = active_kappa5(plant_of(y), cs, g, p);

            if (next_sample < samples.size() && std::abs(samples[next_sample] - t) <= tol) {
                const auto ev = evaluate_control(plant_of(y), cs, refs, il, k5, g, p);
                rec.sample(samples[next_sample], plant_of(y), cs, ev.u, k5, ev.sat1, ev.sat2, il, refs);
                ++next_sample;
            }
            if (ei + 1 == events.size()) break;

            const double len = events[ei + 1] - t;
            const auto n = static_cast<long>(std::max(1.0, std::ceil(len / sc.dt - 1e-9)));
            const double h = len / static_cast<double>(n);
            for (long k = 0; k < n; ++k) {
                const double tk = t + static_cast<double>(k) * h;
                cs.x3ref = y[5];
                cs.x1ref = y[6];
                if (g.kappa5_mode == Kappa5Mode::scheduled)
                    cs.kappa5_sign = update_kappa5_sign(y[0], cs.kappa5_sign, g.hysteresis_band);
                k5 = active_kappa5(plant_of(y), cs, g, p);
                bool first = true;
                auto field = [&](const LoopVec& v) {
                    ControllerState c{v[5], v[6], cs.kappa5_sign};
                    const auto x = plant_of(v);
                    const auto ev = evaluate_control(x, c, refs, il, k5, g, p);
                    if (first) {
                        rec.saturation(tk, ev.sat1, ev.sat2);
                        first = false;
                    }
                    const auto d = derivative(x, ev.u, il, p);
                    return LoopVec{d.x1, d.x2, d.x3, d.x4, d.x5, ev.x3ref_dot, ev.x1ref_dot};
                };
                y = rk4_step(field, y, h);
            }
        } catch (const ControlError& e) {
            throw SimError(t, e.what());
        }
    }
    return rec.finish(sc.horizon);
}

SimResult simulate_switched(const Scenario& sc) {
    require_valid(sc, ModelKind::switched);
    const auto& p = sc.params;
    const auto& g = sc.gains;

    const double period = 1.0 / sc.fsw;
    const double tol = 1e-6 * sc.dt;
    const auto samples = sample_times(sc);
    const auto breaks = merge_times(breakpoint_times(sc), tol);

    Recorder rec(sc, samples.size());
    References refs = refs_at(sc, 0.0);
    double il = sc.il.value_at(0.0);
    ControllerState cs = initial_controller_state(sc.x0, refs, il, g, p);
    PlantVec y = sc.x0.as_array();

    // Held between carrier valleys.
    ControllerState cs_used = cs;
    ControlInput duty;
    double k5 = 0.0;
    bool sat1 = false, sat2 = false;

    std::size_t next_sample = 0;
    const auto n_periods = static_cast<long>(std::ceil(sc.horizon / period - 1e-9));
    for (long k = 0; k < n_periods; ++k) {
        const double t0 = static_cast<double>(k) * period;
        const double t1 = std::min(t0 + period, sc.horizon);
        try {
            const References new_refs = refs_at(sc, t0);
            if (new_refs.x2star != refs.x2star) cs.x1ref += k5 * (new_refs.x2star - refs.x2star);
            refs = new_refs;

            const auto x = PlantState::from_array(y);
            const auto step = controller_step(x, cs, refs, sc.il.value_at(t0), g, p, period);
            cs_used = cs;
            cs_used.kappa5_sign = step.next.kappa5_sign;
            duty = step.u;
            k5 = step.kappa5;
            sat1 = step.sat1;
            sat2 = step.sat2;
            cs = step.next;
            rec.saturation(t0, sat1, sat2);

            std::vector<double> cuts{t0, t1};
            for (double d : {duty.u1, duty.u2}) {
                for (double e : {t0 + 0.5 * d * period, t0 + period - 0.5 * d * period})
                    if (e > t0 + tol && e < t1 - tol) cuts.push_back(e);
            }
            for (std::size_t s = next_sample; s < samples.size() && samples[s] < t1 - tol; ++s) {
                if (samples[s] > t0 + tol) cuts.push_back(samples[s]);
            }
            for (double b : breaks)
                if (b > t0 + tol && b < t1 - tol) cuts.push_back(b);
            cuts = merge_times(std::move(cuts), tol);

            for (std::size_t i = 0; i < cuts.size(); ++i) {
                const double t = cuts[i];
                il = sc.il.value_at(t);
                if (next_sample < samples.size() && std::abs(samples[next_sample] - t) <= tol) {
                    rec.sample(samples[next_sample], PlantState::from_array(y), cs_used, duty, k5, sat1, sat2, il,
                               refs);
                    ++next_sample;
                }
                if (i + 1 == cuts.size()) break;
                const double len = cuts[i + 1] - t;
                const double phase = (0.5 * (t + cuts[i + 1]) - t0) / period;
                const ControlInput s{static_cast<double>(pwm_switch(duty.u1, phase)),
                                     static_cast<double>(pwm_switch(duty.u2, phase))};
                const auto n = static_cast<long>(std::max(1.0, std::ceil(len / sc.dt - 1e-9)));
                const double h = len / static_cast<double>(n);
                auto field = [&](const PlantVec& v) { return plant_field(v, s, il, p); };
                for (long j = 0; j < n; ++j) y = rk4_step(field, y, h);
            }
        } catch (const ControlError& e) {
            throw SimError(t0, e.what());
        }
    }
    // Final sample at the horizon when it coincides with the sampling grid.
    if (next_sample < samples.size() && std::abs(samples[next_sample] - sc.horizon) <= tol) {
        rec.sample(samples[next_sample], PlantState::from_array(y), cs_used, duty, k5, sat1, sat2,
                   sc.il.value_at(sc.horizon), refs);
        ++next_sample;
    }
    return rec.finish(sc.horizon);
}

SimResult simulate(const Scenario& sc) {
    return sc.model == ModelKind::averaged ? simulate_averaged(sc) : simulate_switched(sc);
}

} // namespace scconv
