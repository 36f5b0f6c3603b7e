#include "scconv/analysis.hpp"

#include "scconv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace scconv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

} // namespace

ErrorSystemSigma1 sigma1_error_matrix(const Sigma1Gains& g1, const ConverterParams& p) {
    ErrorSystemSigma1 s;
    s.A[0] = {-(p.R2 + g1.kappa1) / p.L2, 0.0, 0.0};
    s.A[1] = {1.0 / p.C2, -g1.kappa2 / p.C2, -g1.kappa3 / p.C2};
    s.A[2] = {0.0, 1.0, 0.0};
    return s;
}

std::array<double, 4> characteristic_polynomial(const Matrix3& A) {
    const double trace = A[0][0] + A[1][1] + A[2][2];
    const double minors = (A[0][0] * A[1][1] - A[0][1] * A[1][0]) + (A[0][0] * A[2][2] - A[0][2] * A[2][0])
                          + (A[1][1] * A[2][2] - A[1][2] * A[2][1]);
    const double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1])
                       - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0])
                       + A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
    return {1.0, -trace, minors, -det};
}

bool routh_hurwitz(const std::vector<double>& coeffs) {
    if (coeffs.empty() || coeffs.front() == 0.0) return false;
    const std::size_t n = coeffs.size() - 1; // degree
    if (n == 0) return true;
    const double lead = coeffs.front();
    std::vector<double> upper, lower;
    for (std::size_t i = 0; i <= n; i += 2) upper.push_back(coeffs[i] / lead);
    for (std::size_t i = 1; i <= n; i += 2) lower.push_back(coeffs[i] / lead);

    for (std::size_t row = 1; row <= n; ++row) {
        if (lower.empty() || !(lower.front() > 0.0)) return false;
        std::vector<double> next;
        for (std::size_t j = 0; j + 1 < upper.size(); ++j) {
            const double b = j + 1 < lower.size() ? lower[j + 1] : 0.0;
            next.push_back((lower.front() * upper[j + 1] - upper.front() * b) / lower.front());
        }
        upper = std::move(lower);
        lower = std::move(next);
    }
    return true;
}

bool hurwitz(const ErrorSystemSigma1& sys) {
    const auto c = characteristic_polynomial(sys.A);
    return routh_hurwitz({c.begin(), c.end()});
}

double slowest_decay_rate(const ControllerGains& g, const ConverterParams& p) {
    // Block-triangular error matrix: one real mode plus the roots of s^2 + (k2/C2) s + k3/C2.
    const double first = (p.R2 + g.sigma1.kappa1) / p.L2;
    const double b = g.sigma1.kappa2 / p.C2;
    const double c = g.sigma1.kappa3 / p.C2;
    const double disc = b * b - 4.0 * c;
    const double pair = disc < 0.0 ? 0.5 * b : 0.5 * (b - std::sqrt(disc));
    const double current = (p.R1 + g.sigma2.kappa4) / p.L1;
    return std::min({first, pair, current});
}

double default_transient_window(const ControllerGains& g, const ConverterParams& p) {
    return 10.0 / slowest_decay_rate(g, p);
}

double spr_real_part(const ConverterParams& p, double omega) {
    const double a = 1.0 / p.C2 - p.L2 * omega * omega;
    const double b = p.R2 * omega;
    return p.R2 * omega * omega / (a * a + b * b);
}

std::vector<double> default_frequency_grid() {
    constexpr int n = 400;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = std::pow(10.0, 6.0 * i / (n - 1));
    return grid;
}

SprMargin spr_margin(const ConverterParams& p, const std::vector<double>& omega_grid) {
    if (omega_grid.empty()) throw std::invalid_argument("frequency grid is empty");
    SprMargin m{std::numeric_limits<double>::infinity(), 0.0};
    for (double w : omega_grid) {
        if (!(w > 0.0)) throw std::invalid_argument("frequencies must be > 0");
        const double re = spr_real_part(p, w);
        if (re < m.min_real_part) m = {re, w};
    }
    return m;
}

PassivitySignals passivity_signals(const SimResult& traj, const ConverterParams& p) {
    PassivitySignals s;
    const auto n = traj.size();
    for (auto* v : {&s.v, &s.y, &s.w, &s.H1, &s.H2, &s.d2}) v->resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = traj.x1[i], x2 = traj.x2[i], x3 = traj.x3[i], x4 = traj.x4[i], x5 = traj.x5[i];
        const double u2 = traj.u2[i];
        s.w[i] = x2 * u2;
        s.y[i] = x3 * u2;
        s.v[i] = x2 + traj.il[i] / p.C2 * traj.t[i] / u2;
        s.H1[i] = 0.5 * (p.L2 * x3 * x3 + p.C2 * x4 * x4);
        s.H2[i] = 0.5 * (p.L1 * x1 * x1 + p.C1 * x2 * x2 + p.Csc * x5 * x5);
        s.d2[i] = p.R1 * x1 * x1 + p.G * x2 * x2 + p.Gsc * x5 * x5;
    }
    return s;
}

namespace {

/// Derivative at `at` of the quadratic through three points.
double quadratic_slope(const double* x, const double* f, double at) {
    double d = 0.0;
    for (int j = 0; j < 3; ++j) {
        const int a = (j + 1) % 3, b = (j + 2) % 3;
        d += f[j] * ((at - x[a]) + (at - x[b])) / ((x[j] - x[a]) * (x[j] - x[b]));
    }
    return d;
}

} // namespace

std::vector<double> sampled_derivative(const std::vector<double>& t, const std::vector<double>& f,
                                       const std::vector<int>& segment_id) {
    const auto n = t.size();
    if (f.size() != n || (!segment_id.empty() && segment_id.size() != n))
        throw std::invalid_argument("sampled_derivative: length mismatch");
    std::vector<double> d(n, kNaN);
    if (n < 3) return d;
    auto same = [&](std::size_t a, std::size_t b) { return segment_id.empty() || segment_id[a] == segment_id[b]; };
    for (std::size_t i = 0; i < n; ++i) {
        const bool left = i >= 1 && same(i - 1, i);
        const bool right = i + 1 < n && same(i, i + 1);
        std::size_t k0 = 0;
        if (left && right) {
            k0 = i - 1;
        } else if (right && i + 2 < n && same(i, i + 2)) {
            k0 = i;
        } else if (left && i >= 2 && same(i - 2, i)) {
            k0 = i - 2;
        } else {
            continue;
        }
        const double xs[3] = {t[k0], t[k0 + 1], t[k0 + 2]};
        const double fs[3] = {f[k0], f[k0 + 1], f[k0 + 2]};
        d[i] = quadratic_slope(xs, fs, t[i]);
    }
    return d;
}

namespace {

/// Segment index that increments whenever a reference, the load current or a saturation flag
/// changes. The energy rate is not smooth across these points.
std::vector<int> smooth_segments(const SimResult& traj) {
    std::vector<int> seg(traj.size(), 0);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const bool jump = traj.x2star[i] != traj.x2star[i - 1] || traj.x4star[i] != traj.x4star[i - 1]
                          || traj.il[i] != traj.il[i - 1] || traj.sat1[i] != traj.sat1[i - 1]
                          || traj.sat2[i] != traj.sat2[i - 1];
        seg[i] = seg[i - 1] + (jump ? 1 : 0);
    }
    return seg;
}

void require_dense_averaged(const SimResult& traj) {
    if (traj.model != ModelKind::averaged)
        throw std::invalid_argument("passivity residuals need an averaged-mode trajectory");
    if (traj.size() < 3) throw TooCoarse("trajectory has fewer than 3 samples");
    const double period = traj.t[1] - traj.t[0];
    if (!(traj.dt > 0.0) || period > 10.0 * traj.dt * (1.0 + 1e-9))
        throw TooCoarse("sample period must not exceed 10 integration steps");
}

template <class Balance, class Scale>
double normalized_residual(const SimResult& traj, const std::vector<double>& energy, Balance&& balance,
                           Scale&& scale) {
    const auto dH = sampled_derivative(traj.t, energy, smooth_segments(traj));
    double worst = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        norm = std::max(norm, scale(i));
        if (std::isnan(dH[i])) continue;
        worst = std::max(worst, std::abs(dH[i] - balance(i)));
    }
    return norm > 0.0 ? worst / norm : worst;
}

} // namespace

double passivity_residual_sigma2(const SimResult& traj, const ConverterParams& p) {
    require_dense_averaged(traj);
    const auto s = passivity_signals(traj, p);
    auto port = [&](std::size_t i) { return traj.x2[i] * traj.x3[i] * traj.u2[i]; };
    return normalized_residual(
        traj, s.H2, [&](std::size_t i) { return -s.d2[i] - port(i); },
        [&](std::size_t i) { return std::abs(s.d2[i]) + std::abs(port(i)); });
}

double passivity_residual_sigma1(const SimResult& traj, const ConverterParams& p) {
    require_dense_averaged(traj);
    const auto s = passivity_signals(traj, p);
    auto diss = [&](std::size_t i) { return p.R2 * traj.x3[i] * traj.x3[i]; };
    auto port = [&](std::size_t i) { return traj.x2[i] * traj.x3[i] * traj.u2[i]; };
    auto load = [&](std::size_t i) { return traj.x4[i] * traj.il[i]; };
    return normalized_residual(
        traj, s.H1, [&](std::size_t i) { return -diss(i) + port(i) - load(i); },
        [&](std::size_t i) { return std::abs(diss(i)) + std::abs(port(i)) + std::abs(load(i)); });
}

double phi_sup(const SimResult& traj, double x2star, const ConverterParams& p, double transient_cut,
               double window_end) {
    double sup = -1.0;
    const double offset = std::abs(p.G * x2star);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.t[i] < transient_cut || traj.t[i] > window_end) continue;
        sup = std::max(sup, std::abs(traj.x1[i] - traj.x1ref[i]) + std::abs(traj.x3[i]) + offset);
    }
    if (sup < 0.0) throw std::invalid_argument("phi_sup: no sample after the transient cut");
    return sup;
}

double ultimate_bound(double phiM, double kappa5, const Sigma2Gains& g2, const ConverterParams& p) {
    const double den = p.G + kappa5 * g2.u_min;
    if (!(den > 0.0)) throw std::invalid_argument("ultimate_bound: G + kappa5 * u_min must be > 0");
    return phiM / den;
}

ResponseMetrics response_metrics(const SimResult& traj, std::string_view channel, double ref_value, double step_time,
                                 double window_end) {
    if (channel != "x2" && channel != "x4") throw std::invalid_argument("response_metrics: channel must be x2 or x4");
    const auto& y = traj.column(channel);
    const auto& t = traj.t;
    std::size_t first = t.size(), last = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < step_time || t[i] > window_end) continue;
        first = std::min(first, i);
        last = i;
    }
    if (first >= t.size()) throw std::invalid_argument("response_metrics: step_time outside the trajectory");

    ResponseMetrics m;
    const double step = ref_value - y[first];
    const double dir = step >= 0.0 ? 1.0 : -1.0;
    double peak = 0.0;
    for (std::size_t i = first; i <= last; ++i) peak = std::max(peak, dir * (y[i] - ref_value));
    m.overshoot_pct = std::abs(step) > 0.0 ? 100.0 * peak / std::abs(step) : 0.0;

    const double band = 0.02 * std::abs(ref_value);
    std::size_t last_out = t.size();
    for (std::size_t i = first; i <= last; ++i)
        if (std::abs(y[i] - ref_value) > band) last_out = i;
    if (last_out == t.size()) {
        m.settling_time_2pct = 0.0;
    } else if (last_out == last) {
        m.settled = false;
        m.settling_time_2pct = t[last] - step_time;
    } else {
        m.settling_time_2pct = t[last_out + 1] - step_time;
    }

    const double tail_start = 0.9 * t[last];
    double sum = 0.0;
    int count = 0;
    for (std::size_t i = first; i <= last; ++i) {
        if (t[i] < tail_start) continue;
        sum += y[i];
        ++count;
    }
    m.steady_state_error = sum / count - ref_value;
    return m;
}

double log_decay_slope(const std::vector<double>& t, const std::vector<double>& e, double t0, double t1,
                       double floor) {
    double st = 0, sl = 0, stt = 0, stl = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 || t[i] > t1) continue;
        const double a = std::abs(e[i]);
        if (!(a > floor)) continue;
        const double l = std::log(a);
        st += t[i];
        sl += l;
        stt += t[i] * t[i];
        stl += t[i] * l;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("log_decay_slope: fewer than two usable samples");
    const double den = n * stt - st * st;
    return (n * stl - st * sl) / den;
}

std::vector<Plateau> plateaus(const Scenario& sc) {
    std::vector<double> cuts{0.0, sc.horizon};
    for (const auto* s : {&sc.x2star, &sc.x4star, &sc.il})
        for (const auto& b : s->points())
            if (b.time > 0.0 && b.time < sc.horizon) cuts.push_back(b.time);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Plateau> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) out.push_back({cuts[i], cuts[i + 1]});
    return out;
}

ScenarioMetrics scenario_metrics(const Scenario& sc, const SimResult& traj, std::string_view channel) {
    ScenarioMetrics m;
    if (channel.empty()) channel = sc.x2star.points().size() > 1 ? "x2" : "x4";
    m.channel = std::string(channel);
    const auto& sched = channel == "x2" ? sc.x2star : sc.x4star;
    m.ref_value = sched.points().back().value;
    m.step_time = sched.points().back().time;
    m.response = response_metrics(traj, channel, m.ref_value, m.step_time);

    const auto pl = plateaus(sc);
    m.transient_cut = pl.back().start + default_transient_window(sc.gains, sc.params);
    const double x2star = sc.x2star.points().back().value;

    double sx2 = 0, sx4 = 0;
    int n = 0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.t[i] < 0.9 * traj.t.back()) continue;
        sx2 += traj.x2[i];
        sx4 += traj.x4[i];
        ++n;
    }
    m.steady_x2 = sx2 / n;
    m.steady_x4 = sx4 / n;
    m.final_abs_x4_error = std::abs(traj.x4.back() - traj.x4star.back());

    if (m.transient_cut >= traj.t.back()) {
        m.phi_max = m.kappa5_min = m.max_abs_x2_error = kNaN;
        return m;
    }
    m.phi_max = phi_sup(traj, x2star, sc.params, m.transient_cut);
    m.kappa5_min = std::numeric_limits<double>::infinity();
    m.max_abs_x2_error = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.t[i] < m.transient_cut) continue;
        m.kappa5_min = std::min(m.kappa5_min, std::abs(traj.kappa5[i]));
        m.max_abs_x2_error = std::max(m.max_abs_x2_error, std::abs(traj.x2[i] - traj.x2star[i]));
    }
    m.response.ultimate_bound = ultimate_bound(m.phi_max, m.kappa5_min, sc.gains.sigma2, sc.params);
    return m;
}

} // namespace scconv
