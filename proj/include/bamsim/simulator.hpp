#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "bamsim/link.hpp"

namespace bamsim {

// Poisson source for one class. Demand ~ U[demand_min, demand_max], holding
// time ~ Exp(mean_hold). Active on [start, stop).
struct TrafficSource {
    int cls = 0;
    double arrival_rate = 1.0;
    double mean_hold = 10.0;
    double demand_min = 1.0;
    double demand_max = 1.0;
    SimTime start = 0.0;
    std::optional<SimTime> stop;
};

struct Scenario {
    std::string id = "scenario";
    LinkConfig link;
    std::vector<TrafficSource> traffic;
    SimTime duration = 1000.0;
    SimTime window = 50.0;
    std::uint64_t seed = 1;
    BamModel initial_model = BamModel::mam;
};

// Throws ConfigError naming the first offending field.
void validate_scenario(const Scenario& scenario);

enum class EventKind { arrival, departure, model_switch };

std::string_view to_string(EventKind kind);

struct TraceEvent {
    SimTime time = 0.0;
    EventKind kind = EventKind::arrival;
    LspId lsp = 0;
    int cls = -1;
    double demand = 0.0;
    std::string outcome;  // admission outcome, "released", or "MAM->ATCS"
    std::vector<LspId> victims;
    std::vector<LspId> devolved;
    double allocated_after = 0.0;  // total link allocation once the event is applied

    bool operator==(const TraceEvent&) const = default;
};

struct Measurements {
    SimTime start = 0.0;
    SimTime end = 0.0;
    double utilization = 0.0;  // time-weighted allocation / capacity
    double throughput = 1.0;   // carried / offered demand; 1 when nothing was offered
    double blocking = 0.0;     // blocked / requests; 0 when there were no requests
    std::uint64_t requests = 0;
    std::uint64_t blocked = 0;
    std::uint64_t preemptions = 0;
    std::uint64_t devolutions = 0;
    double offered_demand = 0.0;
    double carried_demand = 0.0;
    std::optional<double> loss;  // external pass-through, never computed here

    double length() const { return end - start; }
    // Offered demand per unit of time.
    double offered_rate() const { return length() > 0 ? offered_demand / length() : 0.0; }

    bool operator==(const Measurements&) const = default;
};

// Measures the half-open window [start, end) of a time-ordered trace.
// Allocation before the first event in the window is taken from the last
// earlier event.
Measurements measure(std::span<const TraceEvent> trace, SimTime start, SimTime end, double capacity);

// Seeded discrete-event simulator of one link.
//
// Events are processed in time order; at equal timestamps arrivals come
// before departures, then lower LSP id first. Each class draws from its own
// generator derived from the scenario seed.
class Simulator {
public:
    explicit Simulator(const Scenario& scenario);

    // Processes every event with time < t, then sets the clock to t.
    void run_until(SimTime t);
    // Switches the model at the current clock and records the event.
    SwitchReport switch_model(BamModel to);

    SimTime clock() const { return clock_; }
    const Link& link() const { return link_; }
    const Scenario& scenario() const { return scenario_; }
    const std::vector<TraceEvent>& trace() const { return trace_; }

    Measurements measure(SimTime start, SimTime end) const;

private:
    struct Pending {
        SimTime time;
        int rank;  // 0 arrival, 1 departure
        LspId id;
        int source;  // arrivals: traffic index
        bool operator>(const Pending& o) const
        {
            if (time != o.time) return time > o.time;
            if (rank != o.rank) return rank > o.rank;
            return id > o.id;
        }
    };

    struct Source {
        TrafficSource spec;
        std::mt19937_64 rng;
    };

    double uniform01(std::mt19937_64& rng) const;
    void schedule_arrival(int source, SimTime after);
    void handle(const Pending& ev);

    Scenario scenario_;
    Link link_;
    std::vector<Source> sources_;
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue_;
    std::vector<LspRequest> requests_;  // indexed by id - 1
    std::vector<TraceEvent> trace_;
    SimTime clock_ = 0.0;
    LspId next_id_ = 1;
};

struct ScenarioResult {
    std::vector<TraceEvent> trace;
    std::vector<Measurements> windows;
    Measurements total;
    std::uint64_t preemptions = 0;  // link counters at the end of the run
    std::uint64_t devolutions = 0;
};

// Runs the scenario under a fixed model (no reconfiguration).
ScenarioResult run_scenario(const Scenario& scenario, BamModel model);

// Trace CSV: time,kind,lsp,class,demand,outcome,victims,devolved,allocated.
// Id lists are ';'-separated.
void write_trace_csv(std::span<const TraceEvent> trace, std::ostream& out);

}  // namespace bamsim
