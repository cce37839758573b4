#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cbr/case.hpp"
#include "cbr/case_database.hpp"
#include "cbr/evaluation.hpp"

namespace cbr {

enum class CandidateStatus { proposed, pending_operator };
enum class CandidateOrigin { retrieved, fallback, operator_supplied };
enum class ResolutionMode { assisted, automated };

std::string_view to_string(CandidateStatus status);
std::string_view to_string(CandidateOrigin origin);
std::string_view to_string(ResolutionMode mode);
std::optional<ResolutionMode> parse_resolution_mode(std::string_view text);

struct Provenance {
    std::optional<CaseId> source_case;
    double similarity = 0.0;
};

struct CandidateSolution {
    Problem problem;
    std::vector<Action> actions;
    CandidateStatus status = CandidateStatus::proposed;
    CandidateOrigin origin = CandidateOrigin::retrieved;
    Provenance provenance;
};

// Reuse step: pairs the query with a copy of the retrieved case's actions.
CandidateSolution reuse(const ScoredCase& retrieved, const Problem& query);

// No-case fallback. Automated mode draws uniformly from the catalog minus
// `no_op` with a generator seeded by `seed`; assisted mode returns a
// pending-operator candidate without actions.
// Throws ConfigurationError if there is nothing to draw from.
CandidateSolution fallback_solution(const Problem& query, ResolutionMode mode,
                                    std::span<const Action> catalog, const Action* no_op,
                                    std::uint64_t seed);

struct RevisionPolicy {
    double drift_threshold = 0.2;
    double discount_factor = 0.5;
};

// Revision step. Outcome follows the sign of after.score - before.score;
// confidence is discounted when drift exceeds the threshold.
Case revise(const CandidateSolution& candidate, const EvaluationReport& before,
            const EvaluationReport& after, double drift, const RevisionPolicy& policy,
            SimTime now);

}  // namespace cbr
