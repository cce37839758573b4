#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "bamcbr/loop.hpp"

namespace bamcbr::service {

using nlohmann::json;

struct Event {
    std::uint64_t seq = 0;
    std::string type;
    SimTime time = 0.0;
    json data;
};

json to_json(const Event& e);

// Append-only, sequence-numbered event log with blocking reads.
class EventLog {
public:
    void append(std::vector<Event> events);
    // Events with seq > since, at most `limit`. Waits up to `timeout` when
    // nothing is available yet.
    std::vector<Event> since(std::uint64_t since, std::size_t limit, std::chrono::milliseconds timeout) const;
    std::uint64_t last_seq() const;
    void close();
    bool closed() const;

private:
    mutable std::mutex mu_;
    mutable std::condition_variable cv_;
    std::vector<Event> events_;
    bool closed_ = false;
};

// Immutable view published after every mutation.
struct Snapshot {
    json state;
    std::vector<json> cases;  // created_at desc, id desc
    std::vector<json> revisions;  // id desc
};

struct CaseQuery {
    std::optional<cbr::Outcome> outcome;
    std::optional<std::string> partition;
    std::optional<std::string> cursor;
    std::size_t limit = 50;
};

struct CasePage {
    std::vector<json> cases;
    std::optional<std::string> next_cursor;
};

struct ServiceOptions {
    // Wall-clock time between simulated windows when running on its own.
    std::chrono::milliseconds tick{100};
    bool auto_run = true;
};

// Owns one control loop. Every mutation runs on a single worker thread fed
// by a command queue; readers only touch published snapshots. Before
// start(), commands run on the calling thread.
class ServiceCore {
public:
    ServiceCore(const bamsim::Scenario& scenario, const BamCbrConfig& cfg,
                std::optional<cbr::CaseDatabase> db = std::nullopt, ServiceOptions options = {});
    ~ServiceCore();
    ServiceCore(const ServiceCore&) = delete;
    ServiceCore& operator=(const ServiceCore&) = delete;

    void start();
    void stop();

    std::shared_ptr<const Snapshot> snapshot() const;
    json state() const { return snapshot()->state; }
    // Throws std::invalid_argument for a malformed cursor.
    CasePage cases(const CaseQuery& query) const;
    std::vector<json> revisions(std::optional<RevisionStatus> status) const;

    // Serialized through the worker. Throws RevisionError.
    json submit_decision(std::uint64_t revision, const Verdict& verdict);
    // Closes one window on the worker; false if the loop is finished or paused.
    bool step();
    // Runs `fn` on the worker with exclusive access to the loop.
    void with_loop(const std::function<void(ControlLoop&)>& fn);

    const EventLog& events() const { return events_; }

private:
    template <typename R>
    R submit(std::function<R(ControlLoop&)> fn);
    void worker();
    void publish();
    void on_loop_event(LoopEventType type, std::size_t index);

    ControlLoop loop_;
    ServiceOptions options_;
    EventLog events_;
    std::vector<Event> buffered_;
    std::uint64_t next_seq_ = 1;

    mutable std::mutex snap_mu_;
    std::shared_ptr<const Snapshot> snapshot_;

    std::mutex queue_mu_;
    std::condition_variable queue_cv_;
    std::deque<std::function<void()>> queue_;
    bool stopping_ = false;
    std::thread thread_;
};

json revision_json(const PendingRevision& rev);
json window_json(const WindowRecord& w);
json decision_json(const DecisionRecord& d);

}  // namespace bamcbr::service
