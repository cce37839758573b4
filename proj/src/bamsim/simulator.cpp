#include "bamsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "util/number_format.hpp"

namespace bamsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::string_view to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::arrival: return "arrival";
    case EventKind::departure: return "departure";
    case EventKind::model_switch: return "switch";
    }
    return "?";
}

void validate_scenario(const Scenario& s)
{
    auto errors = validate_config(s.link);
    if (!errors.empty()) throw ConfigError("link: " + errors.front());
    for (std::size_t i = 0; i < s.traffic.size(); ++i) {
        const auto& t = s.traffic[i];
        const auto where = "traffic[" + std::to_string(i) + "].";
        if (t.cls < 0 || t.cls >= s.link.num_classes) throw ConfigError(where + "class is out of range");
        if (!(t.arrival_rate > 0) || !std::isfinite(t.arrival_rate)) throw ConfigError(where + "arrival_rate must be positive");
        if (!(t.mean_hold > 0) || !std::isfinite(t.mean_hold)) throw ConfigError(where + "mean_hold must be positive");
        if (!(t.demand_min > 0)) throw ConfigError(where + "demand_min must be positive");
        if (!(t.demand_max >= t.demand_min)) throw ConfigError(where + "demand_max must be >= demand_min");
        if (!(t.start >= 0)) throw ConfigError(where + "start must be non-negative");
        if (t.stop && !(*t.stop > t.start)) throw ConfigError(where + "stop must be after start");
    }
    if (!(s.duration > 0)) throw ConfigError("duration must be positive");
    if (!(s.window > 0)) throw ConfigError("window must be positive");
}

Simulator::Simulator(const Scenario& scenario)
    : scenario_(scenario), link_(scenario.link, scenario.initial_model)
{
    validate_scenario(scenario_);
    for (std::size_t i = 0; i < scenario_.traffic.size(); ++i) {
        sources_.push_back({scenario_.traffic[i], std::mt19937_64(splitmix64(scenario_.seed ^ splitmix64(i + 1)))});
    }
    for (std::size_t i = 0; i < sources_.size(); ++i) schedule_arrival(static_cast<int>(i), sources_[i].spec.start);
}

double Simulator::uniform01(std::mt19937_64& rng) const
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void Simulator::schedule_arrival(int source, SimTime after)
{
    auto& src = sources_[static_cast<std::size_t>(source)];
    const double gap = -std::log1p(-uniform01(src.rng)) / src.spec.arrival_rate;
    const double demand = src.spec.demand_min + (src.spec.demand_max - src.spec.demand_min) * uniform01(src.rng);
    const double holding = -std::log1p(-uniform01(src.rng)) * src.spec.mean_hold;
    const SimTime at = after + gap;
    if (src.spec.stop && at >= *src.spec.stop) return;

    const LspId id = next_id_++;
    requests_.push_back({id, src.spec.cls, demand, at, holding > 0 ? holding : src.spec.mean_hold * 1e-12});
    queue_.push({at, 0, id, source});
}

void Simulator::handle(const Pending& ev)
{
    const auto& req = requests_[static_cast<std::size_t>(ev.id - 1)];
    if (ev.rank == 0) {
        const auto result = link_.admit(req);
        if (result.admitted()) queue_.push({req.arrival + req.holding, 1, req.id, -1});
        trace_.push_back({ev.time, EventKind::arrival, req.id, req.cls, req.demand,
                          std::string(to_string(result.outcome)), result.preempted, result.devolved,
                          link_.total_allocated()});
        schedule_arrival(ev.source, ev.time);
        return;
    }
    // Preempted or devolved LSPs leave no departure behind.
    if (!link_.is_active(req.id)) return;
    link_.release(req.id);
    trace_.push_back({ev.time, EventKind::departure, req.id, req.cls, req.demand, "released", {}, {},
                      link_.total_allocated()});
}

void Simulator::run_until(SimTime t)
{
    while (!queue_.empty() && queue_.top().time < t) {
        const auto ev = queue_.top();
        queue_.pop();
        clock_ = ev.time;
        handle(ev);
    }
    clock_ = std::max(clock_, t);
}

SwitchReport Simulator::switch_model(BamModel to)
{
    auto report = link_.switch_model(to);
    if (report.from != report.to) {
        trace_.push_back({clock_, EventKind::model_switch, 0, -1, 0.0,
                          std::string(to_string(report.from)) + "->" + std::string(to_string(report.to)), {},
                          report.devolved, link_.total_allocated()});
    }
    return report;
}

Measurements Simulator::measure(SimTime start, SimTime end) const
{
    return bamsim::measure(trace_, start, end, scenario_.link.capacity);
}

Measurements measure(std::span<const TraceEvent> trace, SimTime start, SimTime end, double capacity)
{
    Measurements m;
    m.start = start;
    m.end = end;
    if (!(end > start)) return m;

    auto first = std::lower_bound(trace.begin(), trace.end(), start,
                                  [](const TraceEvent& e, SimTime t) { return e.time < t; });
    double level = first == trace.begin() ? 0.0 : std::prev(first)->allocated_after;
    double area = 0;
    SimTime prev = start;
    for (auto it = first; it != trace.end() && it->time < end; ++it) {
        area += level * (it->time - prev);
        prev = it->time;
        level = it->allocated_after;
        if (it->kind == EventKind::arrival) {
            ++m.requests;
            m.offered_demand += it->demand;
            if (it->outcome == "blocked") {
                ++m.blocked;
            } else {
                m.carried_demand += it->demand;
            }
        }
        m.preemptions += it->victims.size();
        m.devolutions += it->devolved.size();
    }
    area += level * (end - prev);

    m.utilization = std::clamp(area / (capacity * (end - start)), 0.0, 1.0);
    m.blocking = m.requests ? static_cast<double>(m.blocked) / static_cast<double>(m.requests) : 0.0;
    m.throughput = m.offered_demand > 0 ? std::clamp(m.carried_demand / m.offered_demand, 0.0, 1.0) : 1.0;
    return m;
}

ScenarioResult run_scenario(const Scenario& scenario, BamModel model)
{
    Scenario s = scenario;
    s.initial_model = model;
    Simulator sim(s);
    ScenarioResult out;
    for (SimTime start = 0; start < s.duration; start += s.window) {
        const SimTime end = std::min(start + s.window, s.duration);
        sim.run_until(end);
        out.windows.push_back(sim.measure(start, end));
    }
    out.total = sim.measure(0, s.duration);
    out.trace = sim.trace();
    out.preemptions = sim.link().preemptions();
    out.devolutions = sim.link().devolutions();
    return out;
}

namespace {

void write_ids(std::ostream& out, const std::vector<LspId>& ids)
{
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) out << ';';
        out << ids[i];
    }
}

}  // namespace

void write_trace_csv(std::span<const TraceEvent> trace, std::ostream& out)
{
    out << "time,kind,lsp,class,demand,outcome,victims,devolved,allocated\n";
    for (const auto& e : trace) {
        out << util::format_number(e.time) << ',' << to_string(e.kind) << ',' << e.lsp << ',' << e.cls << ','
            << util::format_number(e.demand) << ',' << e.outcome << ',';
        write_ids(out, e.victims);
        out << ',';
        write_ids(out, e.devolved);
        out << ',' << util::format_number(e.allocated_after) << '\n';
    }
}

}  // namespace bamsim
