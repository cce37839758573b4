#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bamcbr/config.hpp"
#include "bamsim/simulator.hpp"
#include "cbr/case_database.hpp"
#include "cbr/reasoning.hpp"
#include "cbr/similarity.hpp"

namespace bamcbr {

inline constexpr std::string_view kSwitchAction = "SwitchBAM";

// Case schema of the BAM domain:
//   static       capacity, bc_mam_<c>, bc_rdm_<c>
//   contextual   bam (indexed, equality)
//   measurement  throughput (maximize), blocking, devolution, preemption
//                (minimize), utilization, loss (minimize, optional)
//   tolerance    one per configured tolerance
// Weights of indexed attributes come from cfg.similarity_weights.
cbr::CaseSchema make_schema(const bamsim::LinkConfig& link, const BamCbrConfig& cfg);

cbr::Action switch_action(bamsim::BamModel target);
// Target of a SwitchBAM action, or nullopt for anything else.
std::optional<bamsim::BamModel> switch_target(const cbr::Action& action);

// Problem for one measurement window. Preemption and devolution enter as
// counts per request in the window, clamped to [0, 1].
// Throws std::invalid_argument for an empty window.
cbr::Problem build_problem(bamsim::BamModel model, const bamsim::LinkConfig& link, const bamsim::Measurements& m,
                           const BamCbrConfig& cfg);

// Premise cases: low utilization on MAM or RDM is solved by switching to ATCS.
std::vector<cbr::Case> premise_cases(const bamsim::LinkConfig& link, const BamCbrConfig& cfg);

// Relative change of offered load between two windows; 0 when both are idle.
double traffic_drift(const bamsim::Measurements& before, const bamsim::Measurements& after);

// Case base, schema and similarity settings bound to one link.
class BamCbrEngine {
public:
    BamCbrEngine(const bamsim::LinkConfig& link, BamCbrConfig cfg, std::uint64_t seed);
    // Adopts an existing database; throws ScenarioError if its schema differs.
    BamCbrEngine(const bamsim::LinkConfig& link, BamCbrConfig cfg, std::uint64_t seed, cbr::CaseDatabase db);

    const bamsim::LinkConfig& link() const { return link_; }
    const BamCbrConfig& config() const { return cfg_; }
    const cbr::CaseSchema& schema() const { return db_.schema(); }
    const cbr::SimilarityConfig& similarity() const { return similarity_; }
    cbr::CaseDatabase& database() { return db_; }
    const cbr::CaseDatabase& database() const { return db_; }
    const std::vector<cbr::Action>& catalog() const { return catalog_; }
    cbr::RevisionPolicy revision_policy() const { return {cfg_.drift_threshold, cfg_.discount_factor}; }

    // Stores the premise cases; returns how many were new.
    std::size_t seed_premises();
    cbr::EvaluationReport evaluate(const cbr::Problem& problem) const;
    cbr::RetainResult retain(cbr::Case c);
    // Seed for the next no-case fallback draw.
    std::uint64_t next_fallback_seed();

private:
    bamsim::LinkConfig link_;
    BamCbrConfig cfg_;
    cbr::CaseDatabase db_;
    cbr::SimilarityConfig similarity_;
    std::vector<cbr::Action> catalog_;
    std::uint64_t seed_;
    std::uint64_t draws_ = 0;
};

enum class Trigger { proactive, reactive };
std::string_view to_string(Trigger trigger);

enum class DecisionKind { no_op, action, pending_operator };
std::string_view to_string(DecisionKind kind);

struct Decision {
    DecisionKind kind = DecisionKind::no_op;
    Trigger trigger = Trigger::proactive;
    SimTime time = 0.0;
    bamsim::BamModel model = bamsim::BamModel::mam;
    bamsim::Measurements window;
    cbr::Problem problem;
    cbr::EvaluationReport evaluation;
    std::optional<cbr::CandidateSolution> candidate;
    std::vector<cbr::LocalScore> breakdown;  // against the source case, if any
    std::string reason;
};

// Retrieve and reuse for one window. A reactive trigger whose score is at or
// above the alarm threshold yields no_op without consulting the case base.
Decision decide(BamCbrEngine& engine, bamsim::BamModel current, const bamsim::Measurements& window, Trigger trigger,
                SimTime now);

struct ReviewResult {
    bamsim::BamModel target = bamsim::BamModel::mam;
    bamsim::Measurements after_window;
    cbr::EvaluationReport after;
    double drift = 0.0;
    cbr::Case revised;
    std::optional<cbr::RetainResult> retain;  // automated mode only
};

// Applies the decision's action, lets the link settle, measures a review
// window, and revises. Automated mode retains the revised case; assisted
// mode leaves that to the operator.
// Requires decision.kind == action. Advances the simulator past the review.
ReviewResult apply_and_review(const Decision& decision, bamsim::Simulator& sim, BamCbrEngine& engine);

}  // namespace bamcbr
