#include "bamcbr/loop.hpp"

#include <algorithm>

namespace bamcbr {

using bamsim::BamModel;

std::string_view to_string(RevisionStatus status)
{
    return status == RevisionStatus::pending ? "pending" : "decided";
}

std::string_view to_string(VerdictKind kind)
{
    switch (kind) {
    case VerdictKind::approve: return "approve";
    case VerdictKind::adjust: return "adjust";
    case VerdictKind::reject: return "reject";
    }
    return "?";
}

std::optional<VerdictKind> parse_verdict(std::string_view text)
{
    if (text == "approve") return VerdictKind::approve;
    if (text == "adjust") return VerdictKind::adjust;
    if (text == "reject") return VerdictKind::reject;
    return std::nullopt;
}

std::string_view to_string(LoopEventType type)
{
    switch (type) {
    case LoopEventType::window_closed: return "window_closed";
    case LoopEventType::decision_made: return "decision_made";
    case LoopEventType::revision_queued: return "revision_queued";
    case LoopEventType::revision_decided: return "revision_decided";
    }
    return "?";
}

namespace {

BamCbrEngine make_engine(const bamsim::Scenario& scenario, const BamCbrConfig& cfg,
                         std::optional<cbr::CaseDatabase> db)
{
    if (db) return BamCbrEngine(scenario.link, cfg, scenario.seed, std::move(*db));
    return BamCbrEngine(scenario.link, cfg, scenario.seed);
}

}  // namespace

ControlLoop::ControlLoop(const bamsim::Scenario& scenario, const BamCbrConfig& cfg, std::optional<cbr::CaseDatabase> db)
    : sim_(scenario), engine_(make_engine(scenario, cfg, std::move(db)))
{
    if (cfg.seed_premises) engine_.seed_premises();
    model_history_.emplace_back(0.0, scenario.initial_model);
    next_proactive_ = cfg.proactive_period;
}

bool ControlLoop::paused() const
{
    return std::any_of(revisions_.begin(), revisions_.end(),
                       [](const PendingRevision& r) { return r.status == RevisionStatus::pending; });
}

BamModel ControlLoop::model_at(SimTime t) const
{
    BamModel m = model_history_.front().second;
    for (const auto& [time, model] : model_history_) {
        if (time > t) break;
        m = model;
    }
    return m;
}

void ControlLoop::switch_to(BamModel to)
{
    if (sim_.link().model() == to) return;
    sim_.switch_model(to);
    model_history_.emplace_back(sim_.clock(), to);
}

void ControlLoop::notify(LoopEventType type, std::size_t index)
{
    if (observer_) observer_(type, index);
}

bool ControlLoop::step()
{
    if (finished() || paused()) return false;
    const auto& scenario = sim_.scenario();
    const SimTime start = window_start_;
    const SimTime end = std::min(start + scenario.window, scenario.duration);
    if (end > sim_.clock()) sim_.run_until(end);

    WindowRecord w;
    w.m = sim_.measure(start, end);
    w.model = model_at(start);
    w.score = engine_.evaluate(build_problem(w.model, engine_.link(), w.m, engine_.config())).score;
    windows_.push_back(w);
    window_start_ = end;
    engine_.database().forget(end);
    notify(LoopEventType::window_closed, windows_.size() - 1);

    // Windows that close inside a review, or retroactively, never trigger.
    if (end <= review_until_ || end < sim_.clock() || end >= scenario.duration) return true;

    std::optional<Trigger> trigger;
    if (end >= next_proactive_) {
        trigger = Trigger::proactive;
        while (next_proactive_ <= end) next_proactive_ += engine_.config().proactive_period;
    } else if (w.score < engine_.config().alarm_threshold) {
        trigger = Trigger::reactive;
    }
    if (trigger) handle_trigger(*trigger, w.m, end);
    return true;
}

void ControlLoop::handle_trigger(Trigger trigger, const bamsim::Measurements& m, SimTime now)
{
    const BamModel current = sim_.link().model();
    Decision d = decide(engine_, current, m, trigger, now);

    DecisionRecord rec;
    rec.time = now;
    rec.trigger = trigger;
    rec.kind = d.kind;
    rec.model = current;
    rec.before_score = d.evaluation.score;
    if (d.candidate) {
        rec.origin = std::string(cbr::to_string(d.candidate->origin));
        rec.source_case = d.candidate->provenance.source_case;
        rec.similarity = d.candidate->provenance.similarity;
        ++stats_.decisions;
        if (d.candidate->origin == cbr::CandidateOrigin::retrieved) {
            ++stats_.hits;
        } else {
            ++stats_.fallbacks;
        }
    }

    const bool assisted = engine_.config().mode == cbr::ResolutionMode::assisted;
    std::optional<PendingRevision> queued;
    switch (d.kind) {
    case DecisionKind::no_op:
        rec.action = "noop";
        break;
    case DecisionKind::pending_operator: {
        rec.action = "pending";
        rec.outcome = "pending";
        PendingRevision rev;
        rev.candidate = *d.candidate;
        rev.before = d.evaluation;
        queued = std::move(rev);
        break;
    }
    case DecisionKind::action: {
        rec.action = cbr::to_string(d.candidate->actions.front());
        ++stats_.actions;
        const auto review = apply_and_review(d, sim_, engine_);
        model_history_.emplace_back(now, review.target);
        review_until_ = sim_.clock();
        rec.after_score = review.after.score;
        if (assisted) {
            rec.outcome = "pending";
            PendingRevision rev;
            rev.candidate = *d.candidate;
            rev.breakdown = d.breakdown;
            rev.before = d.evaluation;
            rev.after = review.after;
            rev.drift = review.drift;
            rev.revised = review.revised;
            queued = std::move(rev);
        } else {
            rec.outcome = std::string(cbr::to_string(review.revised.outcome));
            rec.retained = review.retain && review.retain->status == cbr::RetainStatus::stored;
            if (rec.retained) {
                rec.stored_case = review.retain->id;
                ++stats_.retained;
            }
        }
        break;
    }
    }

    if (queued) {
        queued->id = revisions_.size() + 1;
        queued->created = now;
        queued->model = current;
        if (queued->breakdown.empty()) queued->breakdown = d.breakdown;
        queued->decision_index = decisions_.size();
        rec.revision = queued->id;
    }
    decisions_.push_back(rec);
    notify(LoopEventType::decision_made, decisions_.size() - 1);
    if (queued) {
        revisions_.push_back(std::move(*queued));
        notify(LoopEventType::revision_queued, revisions_.size() - 1);
    }
}

void ControlLoop::run()
{
    while (step()) {
    }
}

const PendingRevision& ControlLoop::submit_verdict(std::uint64_t id, const Verdict& verdict)
{
    if (id == 0 || id > revisions_.size()) {
        throw RevisionError(RevisionError::Code::not_found, "unknown revision " + std::to_string(id));
    }
    auto& rev = revisions_[id - 1];
    if (rev.status == RevisionStatus::decided) {
        throw RevisionError(RevisionError::Code::conflict, "revision " + std::to_string(id) + " is already decided");
    }

    const SimTime now = sim_.clock();
    cbr::Case c;
    std::optional<BamModel> apply;
    switch (verdict.kind) {
    case VerdictKind::approve:
        if (!rev.revised) throw RevisionError(RevisionError::Code::invalid, "nothing to approve; use adjust");
        c = *rev.revised;
        if (c.outcome == cbr::Outcome::unvalidated) c.outcome = cbr::Outcome::positive;
        c.confidence = 1.0;
        break;
    case VerdictKind::adjust: {
        if (verdict.actions.size() != 1) {
            throw RevisionError(RevisionError::Code::invalid, "adjust needs exactly one action");
        }
        const auto target = switch_target(verdict.actions.front());
        if (!target) throw RevisionError(RevisionError::Code::invalid, "adjust needs a SwitchBAM action with a known target");
        if (*target == rev.model) {
            throw RevisionError(RevisionError::Code::invalid, "adjust target must differ from the observed model");
        }
        c.problem = rev.candidate.problem;
        c.solution = {switch_action(*target)};
        c.outcome = cbr::Outcome::positive;
        c.confidence = 1.0;
        apply = *target;
        break;
    }
    case VerdictKind::reject:
        if (rev.revised) {
            c = *rev.revised;
            c.outcome = cbr::Outcome::negative;
        }
        break;
    }

    if (!c.solution.empty()) {
        c.created_at = now;
        rev.retain = engine_.retain(std::move(c));
        if (rev.retain->status == cbr::RetainStatus::stored) ++stats_.retained;
    }
    if (apply) switch_to(*apply);

    rev.status = RevisionStatus::decided;
    rev.verdict = verdict;
    rev.decided_at = now;

    auto& rec = decisions_[rev.decision_index];
    rec.retained = rev.retain && rev.retain->status == cbr::RetainStatus::stored;
    if (rec.retained) rec.stored_case = rev.retain->id;
    rec.outcome = std::string(to_string(verdict.kind));
    notify(LoopEventType::revision_decided, id - 1);
    return rev;
}

}  // namespace bamcbr
