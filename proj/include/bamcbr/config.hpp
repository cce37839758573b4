#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "bamsim/simulator.hpp"
#include "cbr/evaluation.hpp"
#include "cbr/reasoning.hpp"

namespace bamcbr {

using cbr::SimTime;

// Parse or validation failure in a scenario file. `key` is the JSON path of
// the offending entry, e.g. "traffic[1].arrival_rate".
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string key, const std::string& message)
        : std::runtime_error(key + ": " + message), key_(std::move(key))
    {
    }
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

// How a tolerance band is read: absolute units, or a fraction of the target.
enum class ToleranceMode { absolute, relative };

struct ToleranceSpec {
    double target = 0.0;
    double band = 0.0;
    ToleranceMode mode = ToleranceMode::absolute;

    double band_width() const { return mode == ToleranceMode::absolute ? band : band * target; }
    // Bound stored in a problem's tolerance section, clamped to [0, 1].
    double bound(cbr::Objective objective) const;
};

struct BamCbrConfig {
    // Similarity table over the indexed attributes.
    std::map<std::string, double> similarity_weights{
        {"bam", 40.0}, {"throughput", 30.0}, {"blocking", 30.0}, {"devolution", 20.0}, {"preemption", 20.0}};
    double cutoff = 0.96;
    double equivalence = 0.985;
    std::size_t k = 5;

    cbr::EvaluationWeights eval_weights{{"devolution", 3.0}, {"preemption", 2.0}, {"blocking", 1.0}};

    std::map<std::string, ToleranceSpec> tolerances{
        {"throughput", {1.0, 0.05, ToleranceMode::absolute}},
        {"blocking", {0.0, 0.05, ToleranceMode::absolute}},
        {"devolution", {0.0, 0.05, ToleranceMode::absolute}},
        {"preemption", {0.0, 0.05, ToleranceMode::absolute}},
        {"utilization", {0.1, 0.1, ToleranceMode::absolute}},
    };

    SimTime proactive_period = 500.0;
    SimTime settle_time = 100.0;
    SimTime review_window = 0.0;  // 0 = scenario window
    double alarm_threshold = 0.9;
    std::optional<SimTime> case_ttl = 10000.0;  // empty = cases never expire
    double drift_threshold = 0.2;
    double discount_factor = 0.5;
    cbr::ResolutionMode mode = cbr::ResolutionMode::automated;

    bool seed_premises = true;
    double premise_utilization = 0.4;

    // Throws ScenarioError("cbr.<field>", ...).
    void validate() const;
};

struct ScenarioFile {
    bamsim::Scenario scenario;
    BamCbrConfig cbr;
};

// Scenario file schema (JSON):
//   {
//     "id": "name",
//     "link": {"capacity": 100, "classes": 3, "bc_mam": [..], "bc_rdm": [..]},
//     "traffic": [{"class": 0, "arrival_rate": 0.5, "mean_hold": 20,
//                  "demand_min": 1, "demand_max": 5, "start": 0, "stop": 800}],
//     "duration": 2000, "window": 50, "seed": 7, "initial_model": "MAM",
//     "cbr": {"cutoff": 0.96, "equivalence": 0.985, "k": 5, "mode": "automated",
//             "similarity_weights": {...}, "eval_weights": {...},
//             "tolerances": {"blocking": {"target": 0, "band": 0.05, "mode": "absolute"}},
//             "proactive_period": 500, "settle_time": 100, "review_window": 0,
//             "alarm_threshold": 0.9, "case_ttl": 10000 | null,
//             "drift_threshold": 0.2, "discount_factor": 0.5,
//             "seed_premises": true, "premise_utilization": 0.4}
//   }
// Everything except link and duration has a default.
ScenarioFile parse_scenario(const nlohmann::json& j);
ScenarioFile load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const ScenarioFile& file);

}  // namespace bamcbr
