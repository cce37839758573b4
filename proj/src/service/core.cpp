#include "bamcbr/service/core.hpp"

#include <algorithm>
#include <stdexcept>

#include "cbr/json_codec.hpp"
#include "util/number_format.hpp"

namespace bamcbr::service {

namespace {

json measurements_json(const bamsim::Measurements& m)
{
    return {{"start", m.start},
            {"end", m.end},
            {"utilization", m.utilization},
            {"throughput", m.throughput},
            {"blocking", m.blocking},
            {"requests", m.requests},
            {"blocked", m.blocked},
            {"preemptions", m.preemptions},
            {"devolutions", m.devolutions}};
}

template <typename T>
json optional_json(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

std::string cursor_of(const json& c)
{
    return util::format_number(c.at("created_at").get<double>()) + ":" + std::to_string(c.at("id").get<cbr::CaseId>());
}

}  // namespace

json to_json(const Event& e)
{
    return {{"seq", e.seq}, {"type", e.type}, {"time", e.time}, {"data", e.data}};
}

void EventLog::append(std::vector<Event> events)
{
    if (events.empty()) return;
    {
        std::lock_guard lock(mu_);
        for (auto& e : events) events_.push_back(std::move(e));
    }
    cv_.notify_all();
}

std::vector<Event> EventLog::since(std::uint64_t since, std::size_t limit, std::chrono::milliseconds timeout) const
{
    std::unique_lock lock(mu_);
    auto available = [&] { return closed_ || (!events_.empty() && events_.back().seq > since); };
    if (!available()) cv_.wait_for(lock, timeout, available);
    std::vector<Event> out;
    // Sequence numbers are dense and start at 1.
    for (auto i = static_cast<std::size_t>(since); i < events_.size() && out.size() < limit; ++i) {
        out.push_back(events_[i]);
    }
    return out;
}

std::uint64_t EventLog::last_seq() const
{
    std::lock_guard lock(mu_);
    return events_.empty() ? 0 : events_.back().seq;
}

void EventLog::close()
{
    {
        std::lock_guard lock(mu_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool EventLog::closed() const
{
    std::lock_guard lock(mu_);
    return closed_;
}

json window_json(const WindowRecord& w)
{
    auto j = measurements_json(w.m);
    j["model"] = bamsim::to_string(w.model);
    j["score"] = w.score;
    return j;
}

json decision_json(const DecisionRecord& d)
{
    return {{"time", d.time},
            {"trigger", to_string(d.trigger)},
            {"kind", to_string(d.kind)},
            {"model", bamsim::to_string(d.model)},
            {"source_case", optional_json(d.source_case)},
            {"similarity", d.source_case ? json(d.similarity) : json(nullptr)},
            {"origin", d.origin},
            {"action", d.action},
            {"before_score", d.before_score},
            {"after_score", optional_json(d.after_score)},
            {"outcome", d.outcome},
            {"retained", d.retained},
            {"stored_case", optional_json(d.stored_case)},
            {"revision", optional_json(d.revision)}};
}

json revision_json(const PendingRevision& rev)
{
    json actions = json::array();
    for (const auto& a : rev.candidate.actions) actions.push_back(cbr::to_json(a));
    json breakdown = json::array();
    for (const auto& s : rev.breakdown) breakdown.push_back(cbr::to_json(s));
    json verdict = nullptr;
    if (rev.verdict) {
        json va = json::array();
        for (const auto& a : rev.verdict->actions) va.push_back(cbr::to_json(a));
        verdict = {{"kind", to_string(rev.verdict->kind)}, {"actions", va}, {"note", rev.verdict->note}};
    }
    return {
        {"id", rev.id},
        {"status", to_string(rev.status)},
        {"created", rev.created},
        {"model", bamsim::to_string(rev.model)},
        {"problem", cbr::to_json(rev.candidate.problem)},
        {"candidate",
         {{"actions", actions},
          {"status", cbr::to_string(rev.candidate.status)},
          {"origin", cbr::to_string(rev.candidate.origin)},
          {"source_case", optional_json(rev.candidate.provenance.source_case)},
          {"similarity", rev.candidate.provenance.source_case ? json(rev.candidate.provenance.similarity)
                                                               : json(nullptr)}}},
        {"breakdown", breakdown},
        {"before", cbr::to_json(rev.before)},
        {"after", rev.after ? cbr::to_json(*rev.after) : json(nullptr)},
        {"drift", optional_json(rev.drift)},
        {"revised_outcome", rev.revised ? json(cbr::to_string(rev.revised->outcome)) : json(nullptr)},
        {"verdict", verdict},
        {"decided_at", optional_json(rev.decided_at)},
        {"retain_status", rev.retain ? json(cbr::to_string(rev.retain->status)) : json(nullptr)},
        {"case_id", rev.retain && rev.retain->status == cbr::RetainStatus::stored ? json(rev.retain->id)
                                                                                   : json(nullptr)},
    };
}

ServiceCore::ServiceCore(const bamsim::Scenario& scenario, const BamCbrConfig& cfg, std::optional<cbr::CaseDatabase> db,
                         ServiceOptions options)
    : loop_(scenario, cfg, std::move(db)), options_(options)
{
    loop_.set_observer([this](LoopEventType type, std::size_t index) { on_loop_event(type, index); });
    publish();
}

ServiceCore::~ServiceCore() { stop(); }

void ServiceCore::start()
{
    if (thread_.joinable()) return;
    stopping_ = false;
    thread_ = std::thread([this] { worker(); });
}

void ServiceCore::stop()
{
    {
        std::lock_guard lock(queue_mu_);
        stopping_ = true;
    }
    queue_cv_.notify_all();
    if (thread_.joinable()) thread_.join();
    events_.close();
}

void ServiceCore::worker()
{
    for (;;) {
        std::function<void()> cmd;
        {
            std::unique_lock lock(queue_mu_);
            const bool idle = !options_.auto_run || loop_.finished() || loop_.paused();
            if (idle) {
                queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
            } else {
                queue_cv_.wait_for(lock, options_.tick, [&] { return stopping_ || !queue_.empty(); });
            }
            if (stopping_ && queue_.empty()) return;
            if (!queue_.empty()) {
                cmd = std::move(queue_.front());
                queue_.pop_front();
            }
        }
        if (cmd) {
            cmd();
        } else if (loop_.step()) {
            publish();
        }
    }
}

template <typename R>
R ServiceCore::submit(std::function<R(ControlLoop&)> fn)
{
    auto task = std::make_shared<std::packaged_task<R()>>([this, fn = std::move(fn)]() -> R {
        // Publish even when fn throws so the event log stays in step.
        struct Publisher {
            ServiceCore* self;
            ~Publisher() { self->publish(); }
        } guard{this};
        return fn(loop_);
    });
    auto result = task->get_future();
    if (!thread_.joinable()) {
        (*task)();
        return result.get();
    }
    {
        std::lock_guard lock(queue_mu_);
        if (stopping_) throw std::runtime_error("service is stopping");
        queue_.push_back([task] { (*task)(); });
    }
    queue_cv_.notify_all();
    return result.get();
}

json ServiceCore::submit_decision(std::uint64_t revision, const Verdict& verdict)
{
    return submit<json>([&](ControlLoop& loop) { return revision_json(loop.submit_verdict(revision, verdict)); });
}

bool ServiceCore::step()
{
    return submit<bool>([](ControlLoop& loop) { return loop.step(); });
}

void ServiceCore::with_loop(const std::function<void(ControlLoop&)>& fn)
{
    submit<void>(fn);
}

void ServiceCore::on_loop_event(LoopEventType type, std::size_t index)
{
    Event e;
    e.type = std::string(to_string(type));
    switch (type) {
    case LoopEventType::window_closed: {
        const auto& w = loop_.windows()[index];
        e.time = w.m.end;
        e.data = window_json(w);
        break;
    }
    case LoopEventType::decision_made: {
        const auto& d = loop_.decisions()[index];
        e.time = d.time;
        e.data = decision_json(d);
        break;
    }
    case LoopEventType::revision_queued:
    case LoopEventType::revision_decided: {
        const auto& r = loop_.revisions()[index];
        e.time = r.decided_at.value_or(r.created);
        e.data = revision_json(r);
        break;
    }
    }
    buffered_.push_back(std::move(e));
}

void ServiceCore::publish()
{
    auto snap = std::make_shared<Snapshot>();
    const auto& windows = loop_.windows();
    const auto& stats = loop_.stats();
    const auto pending = std::count_if(loop_.revisions().begin(), loop_.revisions().end(),
                                       [](const PendingRevision& r) { return r.status == RevisionStatus::pending; });
    json window = windows.empty() ? measurements_json(bamsim::Measurements{}) : measurements_json(windows.back().m);
    snap->state = {
        {"scenario", loop_.simulator().scenario().id},
        {"clock", loop_.simulator().clock()},
        {"model", bamsim::to_string(loop_.model())},
        {"mode", cbr::to_string(loop_.engine().config().mode)},
        {"finished", loop_.finished()},
        {"paused", loop_.paused()},
        {"window", window},
        {"score", windows.empty() ? 1.0 : windows.back().score},
        {"stats",
         {{"decisions", stats.decisions},
          {"hits", stats.hits},
          {"fallbacks", stats.fallbacks},
          {"actions", stats.actions},
          {"retained", stats.retained}}},
        {"cases", loop_.engine().database().size()},
        {"pending_revisions", pending},
        {"last_seq", next_seq_ - 1 + buffered_.size()},
    };

    auto cases = loop_.engine().database().cases();
    std::sort(cases.begin(), cases.end(), [](const cbr::Case* a, const cbr::Case* b) {
        if (a->created_at != b->created_at) return a->created_at > b->created_at;
        return a->id > b->id;
    });
    for (const auto* c : cases) {
        auto j = cbr::to_json(*c);
        j["partition"] = c->context_signature;
        snap->cases.push_back(std::move(j));
    }
    for (auto it = loop_.revisions().rbegin(); it != loop_.revisions().rend(); ++it) {
        snap->revisions.push_back(revision_json(*it));
    }
    {
        std::lock_guard lock(snap_mu_);
        snapshot_ = std::move(snap);
    }
    for (auto& e : buffered_) e.seq = next_seq_++;
    events_.append(std::move(buffered_));
    buffered_.clear();
}

std::shared_ptr<const Snapshot> ServiceCore::snapshot() const
{
    std::lock_guard lock(snap_mu_);
    return snapshot_;
}

CasePage ServiceCore::cases(const CaseQuery& query) const
{
    std::optional<std::pair<double, cbr::CaseId>> after;
    if (query.cursor) {
        const auto colon = query.cursor->rfind(':');
        try {
            if (colon == std::string::npos) throw std::invalid_argument("no separator");
            std::size_t used = 0;
            const double t = std::stod(query.cursor->substr(0, colon));
            const auto id = std::stoull(query.cursor->substr(colon + 1), &used);
            if (used != query.cursor->size() - colon - 1) throw std::invalid_argument("trailing text");
            after.emplace(t, id);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed cursor '" + *query.cursor + "'");
        }
    }
    const auto snap = snapshot();
    CasePage page;
    const std::size_t limit = std::max<std::size_t>(query.limit, 1);
    for (const auto& c : snap->cases) {
        if (after) {
            const double t = c.at("created_at").get<double>();
            const auto id = c.at("id").get<cbr::CaseId>();
            // Strictly after the cursor in (created_at desc, id desc) order.
            if (t > after->first || (t == after->first && id >= after->second)) continue;
        }
        if (query.outcome && c.at("outcome").get<std::string>() != cbr::to_string(*query.outcome)) continue;
        if (query.partition && c.at("partition").get<std::string>() != *query.partition) continue;
        if (page.cases.size() == limit) {
            page.next_cursor = cursor_of(page.cases.back());
            break;
        }
        page.cases.push_back(c);
    }
    return page;
}

std::vector<json> ServiceCore::revisions(std::optional<RevisionStatus> status) const
{
    const auto snap = snapshot();
    std::vector<json> out;
    for (const auto& r : snap->revisions) {
        if (!status || r.at("status").get<std::string>() == to_string(*status)) out.push_back(r);
    }
    return out;
}

}  // namespace bamcbr::service
