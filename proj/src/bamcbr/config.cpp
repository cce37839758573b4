#include "bamcbr/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace bamcbr {

using nlohmann::json;

double ToleranceSpec::bound(cbr::Objective objective) const
{
    const double b = objective == cbr::Objective::maximize ? target - band_width() : target + band_width();
    return std::clamp(b, 0.0, 1.0);
}

void BamCbrConfig::validate() const
{
    auto unit = [](double v, const char* key) {
        if (!(v >= 0 && v <= 1)) throw ScenarioError(std::string("cbr.") + key, "must lie in [0, 1]");
    };
    unit(cutoff, "cutoff");
    unit(equivalence, "equivalence");
    unit(alarm_threshold, "alarm_threshold");
    unit(drift_threshold, "drift_threshold");
    unit(discount_factor, "discount_factor");
    unit(premise_utilization, "premise_utilization");
    if (equivalence < cutoff) throw ScenarioError("cbr.equivalence", "must be >= cutoff");
    if (k == 0) throw ScenarioError("cbr.k", "must be positive");
    if (!(proactive_period > 0)) throw ScenarioError("cbr.proactive_period", "must be positive");
    if (!(settle_time >= 0)) throw ScenarioError("cbr.settle_time", "must be non-negative");
    if (!(review_window >= 0)) throw ScenarioError("cbr.review_window", "must be non-negative");
    if (case_ttl && !(*case_ttl > 0)) throw ScenarioError("cbr.case_ttl", "must be positive or null");

    static const char* const kSimilarity[] = {"bam", "throughput", "blocking", "devolution", "preemption"};
    for (const auto& [name, w] : similarity_weights) {
        if (std::find_if(std::begin(kSimilarity), std::end(kSimilarity), [&](const char* s) { return name == s; }) ==
            std::end(kSimilarity)) {
            throw ScenarioError("cbr.similarity_weights." + name, "not an indexed attribute");
        }
        if (!(w >= 0)) throw ScenarioError("cbr.similarity_weights." + name, "must be non-negative");
    }
    static const char* const kMeasured[] = {"throughput", "blocking", "devolution", "preemption", "utilization", "loss"};
    auto known = [&](const std::string& name) {
        return std::find_if(std::begin(kMeasured), std::end(kMeasured), [&](const char* s) { return name == s; }) !=
               std::end(kMeasured);
    };
    for (const auto& [name, w] : eval_weights) {
        if (!known(name) || name == "utilization") {
            throw ScenarioError("cbr.eval_weights." + name, "not a measurement with an objective");
        }
        if (!(w >= 0)) throw ScenarioError("cbr.eval_weights." + name, "must be non-negative");
    }
    for (const auto& [name, t] : tolerances) {
        if (!known(name)) throw ScenarioError("cbr.tolerances." + name, "unknown measurement");
        if (!std::isfinite(t.target) || !std::isfinite(t.band) || t.band < 0) {
            throw ScenarioError("cbr.tolerances." + name, "needs a finite target and a non-negative band");
        }
    }
    for (const auto& [name, w] : eval_weights) {
        if (w > 0 && !tolerances.contains(name)) throw ScenarioError("cbr.tolerances." + name, "missing");
    }
}

namespace {

template <typename T>
T get(const json& obj, const char* key, const std::string& path, T fallback)
{
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ScenarioError(path + key, "has the wrong type");
    }
}

template <typename T>
T require(const json& obj, const char* key, const std::string& path)
{
    if (!obj.contains(key)) throw ScenarioError(path + key, "is required");
    return get<T>(obj, key, path, T{});
}

double number(const json& v, const std::string& key)
{
    if (!v.is_number()) throw ScenarioError(key, "must be a number");
    return v.get<double>();
}

ToleranceSpec parse_tolerance(const json& v, const std::string& key)
{
    if (v.is_number()) return {v.get<double>(), 0.0, ToleranceMode::absolute};
    if (!v.is_object()) throw ScenarioError(key, "must be a number or {target, band, mode}");
    ToleranceSpec t;
    t.target = get<double>(v, "target", key + ".", 0.0);
    t.band = get<double>(v, "band", key + ".", 0.0);
    const auto mode = get<std::string>(v, "mode", key + ".", "absolute");
    if (mode == "absolute") {
        t.mode = ToleranceMode::absolute;
    } else if (mode == "relative") {
        t.mode = ToleranceMode::relative;
    } else {
        throw ScenarioError(key + ".mode", "must be absolute or relative");
    }
    return t;
}

BamCbrConfig parse_cbr(const json& j)
{
    BamCbrConfig c;
    if (!j.is_object()) throw ScenarioError("cbr", "must be an object");
    const std::string p = "cbr.";
    c.cutoff = get<double>(j, "cutoff", p, c.cutoff);
    c.equivalence = get<double>(j, "equivalence", p, c.equivalence);
    const auto k = get<long long>(j, "k", p, static_cast<long long>(c.k));
    if (k <= 0) throw ScenarioError("cbr.k", "must be positive");
    c.k = static_cast<std::size_t>(k);
    if (auto it = j.find("mode"); it != j.end()) {
        const auto mode = it->is_string() ? cbr::parse_resolution_mode(it->get<std::string>()) : std::nullopt;
        if (!mode) throw ScenarioError("cbr.mode", "must be assisted or automated");
        c.mode = *mode;
    }
    if (auto it = j.find("similarity_weights"); it != j.end()) {
        if (!it->is_object()) throw ScenarioError("cbr.similarity_weights", "must be an object");
        for (const auto& [name, w] : it->items()) c.similarity_weights[name] = number(w, "cbr.similarity_weights." + name);
    }
    if (auto it = j.find("eval_weights"); it != j.end()) {
        if (!it->is_object()) throw ScenarioError("cbr.eval_weights", "must be an object");
        c.eval_weights.clear();
        for (const auto& [name, w] : it->items()) c.eval_weights[name] = number(w, "cbr.eval_weights." + name);
    }
    if (auto it = j.find("tolerances"); it != j.end()) {
        if (!it->is_object()) throw ScenarioError("cbr.tolerances", "must be an object");
        for (const auto& [name, t] : it->items()) c.tolerances[name] = parse_tolerance(t, "cbr.tolerances." + name);
    }
    c.proactive_period = get<double>(j, "proactive_period", p, c.proactive_period);
    c.settle_time = get<double>(j, "settle_time", p, c.settle_time);
    c.review_window = get<double>(j, "review_window", p, c.review_window);
    c.alarm_threshold = get<double>(j, "alarm_threshold", p, c.alarm_threshold);
    if (auto it = j.find("case_ttl"); it != j.end()) {
        c.case_ttl = it->is_null() ? std::nullopt : std::optional<double>(number(*it, "cbr.case_ttl"));
    }
    c.drift_threshold = get<double>(j, "drift_threshold", p, c.drift_threshold);
    c.discount_factor = get<double>(j, "discount_factor", p, c.discount_factor);
    c.seed_premises = get<bool>(j, "seed_premises", p, c.seed_premises);
    c.premise_utilization = get<double>(j, "premise_utilization", p, c.premise_utilization);
    c.validate();
    return c;
}

void check_scenario(const bamsim::Scenario& s)
{
    try {
        bamsim::validate_scenario(s);
    } catch (const bamsim::ConfigError& e) {
        std::string msg = e.what();
        // Messages lead with the offending field; recover it as the key.
        auto colon = msg.find(':');
        if (msg.rfind("link: ", 0) == 0) throw ScenarioError("link", msg.substr(6));
        auto space = msg.find(' ');
        if (colon == std::string::npos || space < colon) throw ScenarioError(msg.substr(0, space), msg.substr(space + 1));
        throw ScenarioError(msg.substr(0, colon), msg.substr(colon + 2));
    }
}

}  // namespace

ScenarioFile parse_scenario(const json& j)
{
    if (!j.is_object()) throw ScenarioError("<root>", "scenario must be a JSON object");
    ScenarioFile out;
    auto& s = out.scenario;
    s.id = get<std::string>(j, "id", "", s.id);

    if (!j.contains("link")) throw ScenarioError("link", "is required");
    const auto& link = j.at("link");
    if (!link.is_object()) throw ScenarioError("link", "must be an object");
    s.link.capacity = require<double>(link, "capacity", "link.");
    s.link.num_classes = get<int>(link, "classes", "link.", 3);
    s.link.bc_mam = require<std::vector<double>>(link, "bc_mam", "link.");
    s.link.bc_rdm = require<std::vector<double>>(link, "bc_rdm", "link.");

    if (auto it = j.find("traffic"); it != j.end()) {
        if (!it->is_array()) throw ScenarioError("traffic", "must be an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& t = (*it)[i];
            const auto p = "traffic[" + std::to_string(i) + "].";
            if (!t.is_object()) throw ScenarioError(p.substr(0, p.size() - 1), "must be an object");
            bamsim::TrafficSource src;
            src.cls = require<int>(t, "class", p);
            src.arrival_rate = require<double>(t, "arrival_rate", p);
            src.mean_hold = require<double>(t, "mean_hold", p);
            src.demand_min = require<double>(t, "demand_min", p);
            src.demand_max = get<double>(t, "demand_max", p, src.demand_min);
            src.start = get<double>(t, "start", p, 0.0);
            if (t.contains("stop") && !t.at("stop").is_null()) src.stop = get<double>(t, "stop", p, 0.0);
            s.traffic.push_back(src);
        }
    }
    s.duration = require<double>(j, "duration", "");
    s.window = get<double>(j, "window", "", s.window);
    s.seed = get<std::uint64_t>(j, "seed", "", s.seed);
    const auto model = get<std::string>(j, "initial_model", "", "MAM");
    const auto parsed = bamsim::parse_model(model);
    if (!parsed) throw ScenarioError("initial_model", "unknown model '" + model + "'");
    s.initial_model = *parsed;

    check_scenario(s);
    if (auto it = j.find("cbr"); it != j.end()) {
        out.cbr = parse_cbr(*it);
    } else {
        out.cbr.validate();
    }
    return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ScenarioError(path.string(), "cannot open scenario file");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError(path.string(), e.what());
    }
    return parse_scenario(j);
}

json to_json(const ScenarioFile& file)
{
    const auto& s = file.scenario;
    const auto& c = file.cbr;
    json traffic = json::array();
    for (const auto& t : s.traffic) {
        traffic.push_back({{"class", t.cls},
                           {"arrival_rate", t.arrival_rate},
                           {"mean_hold", t.mean_hold},
                           {"demand_min", t.demand_min},
                           {"demand_max", t.demand_max},
                           {"start", t.start},
                           {"stop", t.stop ? json(*t.stop) : json(nullptr)}});
    }
    json tolerances = json::object();
    for (const auto& [name, t] : c.tolerances) {
        tolerances[name] = {{"target", t.target},
                            {"band", t.band},
                            {"mode", t.mode == ToleranceMode::absolute ? "absolute" : "relative"}};
    }
    return {
        {"id", s.id},
        {"link", {{"capacity", s.link.capacity}, {"classes", s.link.num_classes}, {"bc_mam", s.link.bc_mam}, {"bc_rdm", s.link.bc_rdm}}},
        {"traffic", traffic},
        {"duration", s.duration},
        {"window", s.window},
        {"seed", s.seed},
        {"initial_model", std::string(bamsim::to_string(s.initial_model))},
        {"cbr",
         {{"cutoff", c.cutoff},
          {"equivalence", c.equivalence},
          {"k", c.k},
          {"mode", std::string(cbr::to_string(c.mode))},
          {"similarity_weights", c.similarity_weights},
          {"eval_weights", c.eval_weights},
          {"tolerances", tolerances},
          {"proactive_period", c.proactive_period},
          {"settle_time", c.settle_time},
          {"review_window", c.review_window},
          {"alarm_threshold", c.alarm_threshold},
          {"case_ttl", c.case_ttl ? json(*c.case_ttl) : json(nullptr)},
          {"drift_threshold", c.drift_threshold},
          {"discount_factor", c.discount_factor},
          {"seed_premises", c.seed_premises},
          {"premise_utilization", c.premise_utilization}}},
    };
}

}  // namespace bamcbr
