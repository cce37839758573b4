#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bamcbr/binding.hpp"

namespace bamcbr {

struct WindowRecord {
    bamsim::Measurements m;
    bamsim::BamModel model = bamsim::BamModel::mam;
    double score = 1.0;
};

// One line of the decision log.
struct DecisionRecord {
    SimTime time = 0.0;
    Trigger trigger = Trigger::proactive;
    DecisionKind kind = DecisionKind::no_op;
    bamsim::BamModel model = bamsim::BamModel::mam;
    std::optional<cbr::CaseId> source_case;
    double similarity = 0.0;
    std::string origin;  // retrieved, fallback, operator, or empty for gated no-ops
    std::string action;  // "noop", "pending", or e.g. "SwitchBAM(ATCS)"
    double before_score = 1.0;
    std::optional<double> after_score;
    std::string outcome;  // revised outcome, "pending", or empty
    bool retained = false;
    std::optional<cbr::CaseId> stored_case;
    std::optional<std::uint64_t> revision;
};

enum class RevisionStatus { pending, decided };
std::string_view to_string(RevisionStatus status);

enum class VerdictKind { approve, adjust, reject };
std::string_view to_string(VerdictKind kind);
std::optional<VerdictKind> parse_verdict(std::string_view text);

struct Verdict {
    VerdictKind kind = VerdictKind::approve;
    std::vector<cbr::Action> actions;  // adjust only
    std::string note;
};

// Operator work item created in assisted mode.
struct PendingRevision {
    std::uint64_t id = 0;
    SimTime created = 0.0;
    bamsim::BamModel model = bamsim::BamModel::mam;  // model when the problem was observed
    cbr::CandidateSolution candidate;
    std::vector<cbr::LocalScore> breakdown;
    cbr::EvaluationReport before;
    std::optional<cbr::EvaluationReport> after;  // set when the action was trialled
    std::optional<double> drift;
    std::optional<cbr::Case> revised;
    RevisionStatus status = RevisionStatus::pending;
    std::optional<Verdict> verdict;
    std::optional<SimTime> decided_at;
    std::optional<cbr::RetainResult> retain;
    std::size_t decision_index = 0;
};

class RevisionError : public std::runtime_error {
public:
    enum class Code { not_found, conflict, invalid };
    RevisionError(Code code, const std::string& message) : std::runtime_error(message), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

enum class LoopEventType { window_closed, decision_made, revision_queued, revision_decided };
std::string_view to_string(LoopEventType type);

struct RunStats {
    std::size_t decisions = 0;  // triggers that reached the case base
    std::size_t hits = 0;       // decisions backed by a retrieved case
    std::size_t fallbacks = 0;
    std::size_t actions = 0;
    std::size_t retained = 0;

    double hit_rate() const { return decisions ? static_cast<double>(hits) / static_cast<double>(decisions) : 0.0; }
};

// Windowed 4R control loop over one simulated link.
//
// Every window is measured and scored. At a window boundary the proactive
// trigger fires once per period; otherwise the reactive trigger fires when
// the score drops below the alarm threshold. An applied action is reviewed
// over [t + settle, t + settle + review); windows crossed meanwhile are
// recorded without triggering. In assisted mode the loop pauses while any
// revision is pending.
class ControlLoop {
public:
    using Observer = std::function<void(LoopEventType, std::size_t index)>;

    ControlLoop(const bamsim::Scenario& scenario, const BamCbrConfig& cfg,
                std::optional<cbr::CaseDatabase> db = std::nullopt);

    bool finished() const { return window_start_ >= sim_.scenario().duration; }
    bool paused() const;
    // Closes one window. Returns false when finished or paused.
    bool step();
    void run();

    // Throws RevisionError.
    const PendingRevision& submit_verdict(std::uint64_t revision, const Verdict& verdict);

    // Index arguments refer to windows(), decisions() or revisions().
    void set_observer(Observer observer) { observer_ = std::move(observer); }

    const bamsim::Simulator& simulator() const { return sim_; }
    const BamCbrEngine& engine() const { return engine_; }
    BamCbrEngine& engine() { return engine_; }
    const std::vector<WindowRecord>& windows() const { return windows_; }
    const std::vector<DecisionRecord>& decisions() const { return decisions_; }
    const std::vector<PendingRevision>& revisions() const { return revisions_; }
    const RunStats& stats() const { return stats_; }
    bamsim::BamModel model() const { return sim_.link().model(); }

private:
    bamsim::BamModel model_at(SimTime t) const;
    void switch_to(bamsim::BamModel to);
    void handle_trigger(Trigger trigger, const bamsim::Measurements& m, SimTime now);
    void notify(LoopEventType type, std::size_t index);

    bamsim::Simulator sim_;
    BamCbrEngine engine_;
    std::vector<std::pair<SimTime, bamsim::BamModel>> model_history_;
    SimTime window_start_ = 0.0;
    SimTime next_proactive_ = 0.0;
    SimTime review_until_ = -1.0;
    std::vector<WindowRecord> windows_;
    std::vector<DecisionRecord> decisions_;
    std::vector<PendingRevision> revisions_;
    RunStats stats_;
    Observer observer_;
};

}  // namespace bamcbr
