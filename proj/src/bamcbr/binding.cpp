#include "bamcbr/binding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cbr/json_codec.hpp"

namespace bamcbr {

using bamsim::BamModel;
using cbr::AttributeKind;
using cbr::AttributeSchema;
using cbr::NumericDomain;

namespace {

struct MeasurementDef {
    const char* name;
    cbr::Objective objective;
};

constexpr MeasurementDef kMeasurements[] = {
    {"throughput", cbr::Objective::maximize}, {"blocking", cbr::Objective::minimize},
    {"devolution", cbr::Objective::minimize}, {"preemption", cbr::Objective::minimize},
    {"utilization", cbr::Objective::none},    {"loss", cbr::Objective::minimize},
};

double weight_of(const BamCbrConfig& cfg, const std::string& name)
{
    auto it = cfg.similarity_weights.find(name);
    return it == cfg.similarity_weights.end() ? 0.0 : it->second;
}

cbr::Objective objective_of(const std::string& name)
{
    for (const auto& m : kMeasurements) {
        if (name == m.name) return m.objective;
    }
    return cbr::Objective::none;
}

double ratio(std::uint64_t count, std::uint64_t requests)
{
    return std::clamp(static_cast<double>(count) / static_cast<double>(std::max<std::uint64_t>(requests, 1)), 0.0, 1.0);
}

}  // namespace

cbr::CaseSchema make_schema(const bamsim::LinkConfig& link, const BamCbrConfig& cfg)
{
    std::vector<AttributeSchema> attrs;
    const NumericDomain bw{0.0, link.capacity, "Mbps"};
    attrs.push_back({"capacity", AttributeKind::static_attribute, bw, cbr::local::Linear{}, 0.0, false, cbr::Objective::none});
    for (int c = 0; c < link.num_classes; ++c) {
        attrs.push_back({"bc_mam_" + std::to_string(c), AttributeKind::static_attribute, bw, cbr::local::Linear{}, 0.0,
                         false, cbr::Objective::none});
        attrs.push_back({"bc_rdm_" + std::to_string(c), AttributeKind::static_attribute, bw, cbr::local::Linear{}, 0.0,
                         false, cbr::Objective::none});
    }

    std::vector<std::string> labels;
    for (auto m : bamsim::kAllModels) labels.emplace_back(bamsim::to_string(m));
    const double bam_weight = weight_of(cfg, "bam");
    attrs.push_back({"bam", AttributeKind::contextual, cbr::CategoricalDomain{labels}, cbr::local::Equality{},
                     bam_weight, bam_weight > 0, cbr::Objective::none});

    const NumericDomain unit{0.0, 1.0, ""};
    for (const auto& m : kMeasurements) {
        const double w = weight_of(cfg, m.name);
        attrs.push_back({m.name, AttributeKind::measurement, unit, cbr::local::Linear{}, w, w > 0, m.objective});
    }
    for (const auto& [name, tol] : cfg.tolerances) {
        attrs.push_back({name, AttributeKind::tolerance, unit, cbr::local::Linear{}, 0.0, false, cbr::Objective::none});
    }
    return cbr::CaseSchema(std::move(attrs), {std::string(kSwitchAction)});
}

cbr::Action switch_action(BamModel target)
{
    return {std::string(kSwitchAction), {{"target", std::string(bamsim::to_string(target))}}};
}

std::optional<BamModel> switch_target(const cbr::Action& action)
{
    if (action.name != kSwitchAction) return std::nullopt;
    auto it = action.parameters.find("target");
    if (it == action.parameters.end()) return std::nullopt;
    const auto* text = std::get_if<std::string>(&it->second);
    return text ? bamsim::parse_model(*text) : std::nullopt;
}

cbr::Problem build_problem(BamModel model, const bamsim::LinkConfig& link, const bamsim::Measurements& m,
                           const BamCbrConfig& cfg)
{
    if (!(m.end > m.start)) throw std::invalid_argument("measurement window is empty");
    cbr::Problem p;
    p.static_attributes["capacity"] = link.capacity;
    for (int c = 0; c < link.num_classes; ++c) {
        p.static_attributes["bc_mam_" + std::to_string(c)] = link.bc_mam[static_cast<std::size_t>(c)];
        p.static_attributes["bc_rdm_" + std::to_string(c)] = link.bc_rdm[static_cast<std::size_t>(c)];
    }
    p.contextual["bam"] = std::string(bamsim::to_string(model));
    p.measurements["throughput"] = m.throughput;
    p.measurements["blocking"] = m.blocking;
    p.measurements["devolution"] = ratio(m.devolutions, m.requests);
    p.measurements["preemption"] = ratio(m.preemptions, m.requests);
    p.measurements["utilization"] = m.utilization;
    if (m.loss) p.measurements["loss"] = std::clamp(*m.loss, 0.0, 1.0);
    for (const auto& [name, tol] : cfg.tolerances) p.tolerances[name] = tol.bound(objective_of(name));
    return p;
}

std::vector<cbr::Case> premise_cases(const bamsim::LinkConfig& link, const BamCbrConfig& cfg)
{
    std::vector<cbr::Case> out;
    for (auto model : {BamModel::mam, BamModel::rdm}) {
        bamsim::Measurements m;
        m.end = 1.0;
        m.utilization = cfg.premise_utilization;
        cbr::Case c;
        c.problem = build_problem(model, link, m, cfg);
        c.solution = {switch_action(BamModel::atcs)};
        out.push_back(std::move(c));
    }
    return out;
}

double traffic_drift(const bamsim::Measurements& before, const bamsim::Measurements& after)
{
    const double a = before.offered_rate();
    const double b = after.offered_rate();
    if (a == 0 && b == 0) return 0.0;
    if (a == 0) return 1.0;
    return std::abs(b - a) / a;
}

BamCbrEngine::BamCbrEngine(const bamsim::LinkConfig& link, BamCbrConfig cfg, std::uint64_t seed)
    : BamCbrEngine(link, cfg, seed, cbr::CaseDatabase(make_schema(link, cfg)))
{
}

BamCbrEngine::BamCbrEngine(const bamsim::LinkConfig& link, BamCbrConfig cfg, std::uint64_t seed, cbr::CaseDatabase db)
    : link_(link), cfg_(std::move(cfg)), db_(std::move(db)), seed_(seed)
{
    cfg_.validate();
    if (cbr::to_json(db_.schema()) != cbr::to_json(make_schema(link_, cfg_))) {
        throw ScenarioError("cbr", "case database schema does not match this link and configuration");
    }
    similarity_ = cbr::SimilarityConfig::from_schema(db_.schema(), cfg_.cutoff, cfg_.equivalence, cfg_.k);
    for (auto m : bamsim::kAllModels) catalog_.push_back(switch_action(m));
}

std::size_t BamCbrEngine::seed_premises()
{
    return db_.seed_premises(premise_cases(link_, cfg_), similarity_);
}

cbr::EvaluationReport BamCbrEngine::evaluate(const cbr::Problem& problem) const
{
    return cbr::evaluate(db_.schema(), cfg_.eval_weights, problem.measurements, problem.tolerances);
}

cbr::RetainResult BamCbrEngine::retain(cbr::Case c)
{
    return db_.retain(std::move(c), similarity_, cfg_.case_ttl);
}

std::uint64_t BamCbrEngine::next_fallback_seed()
{
    return seed_ ^ (0x9e3779b97f4a7c15ULL * ++draws_);
}

std::string_view to_string(Trigger trigger)
{
    return trigger == Trigger::proactive ? "proactive" : "reactive";
}

std::string_view to_string(DecisionKind kind)
{
    switch (kind) {
    case DecisionKind::no_op: return "noop";
    case DecisionKind::action: return "action";
    case DecisionKind::pending_operator: return "pending";
    }
    return "?";
}

Decision decide(BamCbrEngine& engine, BamModel current, const bamsim::Measurements& window, Trigger trigger,
                SimTime now)
{
    Decision d;
    d.trigger = trigger;
    d.time = now;
    d.model = current;
    d.window = window;
    d.problem = build_problem(current, engine.link(), window, engine.config());
    d.evaluation = engine.evaluate(d.problem);

    if (trigger == Trigger::reactive && d.evaluation.score >= engine.config().alarm_threshold) {
        d.reason = "score at or above alarm threshold";
        return d;
    }

    const auto hits = cbr::retrieve(engine.database(), d.problem, engine.similarity(), now);
    if (!hits.empty()) {
        d.candidate = cbr::reuse(hits.front(), d.problem);
        d.breakdown = cbr::similarity_breakdown(engine.similarity(), d.problem, hits.front().match.problem);
        const auto target = d.candidate->actions.empty() ? std::nullopt : switch_target(d.candidate->actions.front());
        if (!target || *target == current) {
            d.reason = "retrieved solution keeps the current model";
            return d;
        }
        d.kind = DecisionKind::action;
        d.reason = "retrieved case " + std::to_string(hits.front().match.id);
        return d;
    }

    const auto no_op = switch_action(current);
    d.candidate = cbr::fallback_solution(d.problem, engine.config().mode, engine.catalog(), &no_op,
                                         engine.next_fallback_seed());
    if (d.candidate->status == cbr::CandidateStatus::pending_operator) {
        d.kind = DecisionKind::pending_operator;
        d.reason = "no similar case; awaiting operator";
    } else {
        d.kind = DecisionKind::action;
        d.reason = "no similar case; random action";
    }
    return d;
}

ReviewResult apply_and_review(const Decision& decision, bamsim::Simulator& sim, BamCbrEngine& engine)
{
    if (decision.kind != DecisionKind::action || !decision.candidate || decision.candidate->actions.empty()) {
        throw std::invalid_argument("apply_and_review needs an action decision");
    }
    const auto target = switch_target(decision.candidate->actions.front());
    if (!target) throw std::invalid_argument("unsupported action " + cbr::to_string(decision.candidate->actions.front()));

    const auto& cfg = engine.config();
    const SimTime review = cfg.review_window > 0 ? cfg.review_window : sim.scenario().window;

    ReviewResult r;
    r.target = *target;
    sim.switch_model(*target);
    const SimTime start = sim.clock() + cfg.settle_time;
    const SimTime end = start + review;
    sim.run_until(end);
    r.after_window = sim.measure(start, end);
    r.after = engine.evaluate(build_problem(*target, engine.link(), r.after_window, cfg));
    r.drift = traffic_drift(decision.window, r.after_window);
    r.revised = cbr::revise(*decision.candidate, decision.evaluation, r.after, r.drift, engine.revision_policy(),
                            sim.clock());
    if (cfg.mode == cbr::ResolutionMode::automated) {
        r.retain = engine.retain(r.revised);
        if (r.retain->status == cbr::RetainStatus::stored) r.revised.id = r.retain->id;
    }
    return r;
}

}  // namespace bamcbr
