#include "scconv/report.hpp"

#include <json.hpp>

#include <cmath>

namespace scconv {

namespace {

using Json = nlohmann::ordered_json;

Json num(double v) {
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

Json metrics_object(const ScenarioMetrics& m) {
    Json j;
    j["channel"] = m.channel;
    j["ref_value"] = num(m.ref_value);
    j["step_time"] = num(m.step_time);
    j["settling_time_2pct"] = num(m.response.settling_time_2pct);
    j["settled"] = m.response.settled;
    j["overshoot_pct"] = num(m.response.overshoot_pct);
    j["steady_state_error"] = num(m.response.steady_state_error);
    j["ultimate_bound"] = num(m.response.ultimate_bound);
    j["transient_cut"] = num(m.transient_cut);
    j["phi_max"] = num(m.phi_max);
    j["kappa5_min"] = num(m.kappa5_min);
    j["max_abs_x2_error"] = num(m.max_abs_x2_error);
    j["steady_x2"] = num(m.steady_x2);
    j["steady_x4"] = num(m.steady_x4);
    j["final_abs_x4_error"] = num(m.final_abs_x4_error);
    return j;
}

} // namespace

std::string metrics_document(const std::string& scenario, const ScenarioMetrics& m,
                             std::optional<double> passivity_residual) {
    Json body = metrics_object(m);
    body["passivity_residual_sigma2"] = passivity_residual ? num(*passivity_residual) : Json(nullptr);
    Json doc;
    doc[scenario] = body;
    return doc.dump(2) + "\n";
}

std::string sweep_summary_document(const std::string& scenario, const std::string& gain,
                                   const std::vector<SweepRow>& rows) {
    Json runs = Json::array();
    for (const auto& r : rows) {
        Json j;
        j["value"] = num(r.value);
        j["name"] = r.run_name;
        if (!r.error.empty()) {
            j["status"] = r.guard_trip ? "guard_trip" : "error";
            j["error"] = r.error;
        } else {
            j["status"] = "ok";
        }
        if (r.metrics) {
            j["settling_time_2pct"] = num(r.metrics->response.settling_time_2pct);
            j["settled"] = r.metrics->response.settled;
            j["overshoot_pct"] = num(r.metrics->response.overshoot_pct);
            j["steady_state_error"] = num(r.metrics->response.steady_state_error);
            j["steady_x2"] = num(r.metrics->steady_x2);
            j["steady_x4"] = num(r.metrics->steady_x4);
        }
        runs.push_back(j);
    }
    Json doc;
    doc["scenario"] = scenario;
    doc["gain"] = gain;
    doc["runs"] = runs;
    return doc.dump(2) + "\n";
}

} // namespace scconv
