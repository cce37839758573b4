#include "cbr/reasoning.hpp"

#include <random>
#include <vector>

namespace cbr {

std::string_view to_string(CandidateStatus status)
{
    return status == CandidateStatus::proposed ? "proposed" : "pending_operator";
}

std::string_view to_string(CandidateOrigin origin)
{
    switch (origin) {
    case CandidateOrigin::retrieved: return "retrieved";
    case CandidateOrigin::fallback: return "fallback";
    case CandidateOrigin::operator_supplied: return "operator";
    }
    return "?";
}

std::string_view to_string(ResolutionMode mode)
{
    return mode == ResolutionMode::assisted ? "assisted" : "automated";
}

std::optional<ResolutionMode> parse_resolution_mode(std::string_view text)
{
    if (text == "assisted") return ResolutionMode::assisted;
    if (text == "automated") return ResolutionMode::automated;
    return std::nullopt;
}

CandidateSolution reuse(const ScoredCase& retrieved, const Problem& query)
{
    CandidateSolution out;
    out.problem = query;
    out.actions = retrieved.match.solution;
    out.status = CandidateStatus::proposed;
    out.origin = CandidateOrigin::retrieved;
    out.provenance = {retrieved.match.id, retrieved.similarity};
    return out;
}

CandidateSolution fallback_solution(const Problem& query, ResolutionMode mode, std::span<const Action> catalog,
                                    const Action* no_op, std::uint64_t seed)
{
    if (catalog.empty()) throw ConfigurationError("fallback needs a non-empty action catalog");

    CandidateSolution out;
    out.problem = query;
    out.origin = CandidateOrigin::fallback;
    if (mode == ResolutionMode::assisted) {
        out.status = CandidateStatus::pending_operator;
        return out;
    }

    std::vector<const Action*> choices;
    for (const auto& action : catalog) {
        if (!no_op || !(action == *no_op)) choices.push_back(&action);
    }
    if (choices.empty()) throw ConfigurationError("fallback catalog holds only the no-op action");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
    out.actions.push_back(*choices[pick(rng)]);
    out.status = CandidateStatus::proposed;
    return out;
}

Case revise(const CandidateSolution& candidate, const EvaluationReport& before, const EvaluationReport& after,
            double drift, const RevisionPolicy& policy, SimTime now)
{
    Case c;
    c.problem = candidate.problem;
    c.solution = candidate.actions;
    if (after.score > before.score) {
        c.outcome = Outcome::positive;
    } else if (after.score < before.score) {
        c.outcome = Outcome::negative;
    } else {
        c.outcome = Outcome::unvalidated;
    }
    c.confidence = drift > policy.drift_threshold ? policy.discount_factor : 1.0;
    c.created_at = now;
    return c;
}

}  // namespace cbr
