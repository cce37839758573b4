#include "cbr/case_database.hpp"

#include <algorithm>
#include <utility>

#include "cbr/kernels.hpp"

namespace cbr {

std::string_view to_string(RetainStatus status)
{
    switch (status) {
    case RetainStatus::stored: return "stored";
    case RetainStatus::rejected_equivalent: return "rejected_equivalent";
    case RetainStatus::rejected_unvalidated: return "rejected_unvalidated";
    }
    return "?";
}

CaseDatabase::CaseDatabase(CaseSchema schema) : schema_(std::move(schema)) {}

RetainResult CaseDatabase::retain(Case c, const SimilarityConfig& config, std::optional<SimTime> ttl,
                                  const RetentionPolicy& policy)
{
    if (c.outcome == Outcome::unvalidated && !policy.retain_unvalidated) {
        return {RetainStatus::rejected_unvalidated, 0, 0};
    }
    schema_.validate_case(c);
    if (c.solution.empty()) throw ConfigurationError("a retained case needs a non-empty solution");

    c.context_signature = schema_.context_signature(c.problem);
    auto& part = partitions_[c.context_signature];
    for (const auto& existing : part) {
        if (existing.outcome != c.outcome) continue;
        if (global_similarity(config, c.problem, existing.problem) >= config.equivalence) {
            return {RetainStatus::rejected_equivalent, 0, existing.id};
        }
    }

    c.valid_until = ttl ? std::optional<SimTime>(c.created_at + *ttl) : std::nullopt;
    c.id = next_id_++;
    const auto id = c.id;
    part.push_back(std::move(c));
    ++size_;
    return {RetainStatus::stored, id, 0};
}

std::size_t CaseDatabase::forget(SimTime now)
{
    std::size_t purged = 0;
    for (auto& [signature, part] : partitions_) {
        purged += std::erase_if(part, [now](const Case& c) { return c.expired_at(now); });
    }
    size_ -= purged;
    return purged;
}

std::size_t CaseDatabase::seed_premises(std::vector<Case> premises, const SimilarityConfig& config)
{
    std::size_t stored = 0;
    for (std::size_t i = 0; i < premises.size(); ++i) {
        auto& premise = premises[i];
        premise.outcome = Outcome::positive;
        premise.confidence = 1.0;
        RetainResult result;
        try {
            result = retain(std::move(premise), config, std::nullopt);
        } catch (const ConfigurationError& e) {
            throw ConfigurationError("premise #" + std::to_string(i) + ": " + e.what());
        }
        if (result.status == RetainStatus::stored) ++stored;
    }
    return stored;
}

void CaseDatabase::insert_verbatim(Case c)
{
    schema_.validate_case(c);
    const auto signature = schema_.context_signature(c.problem);
    if (c.context_signature != signature) {
        throw ConfigurationError("case " + std::to_string(c.id) + ": context signature does not match its problem");
    }
    if (c.id == 0) c.id = next_id_;
    if (find(c.id)) throw ConfigurationError("duplicate case id " + std::to_string(c.id));
    next_id_ = std::max(next_id_, c.id + 1);
    partitions_[signature].push_back(std::move(c));
    ++size_;
}

const Case* CaseDatabase::find(CaseId id) const
{
    for (const auto& [signature, part] : partitions_) {
        for (const auto& c : part) {
            if (c.id == id) return &c;
        }
    }
    return nullptr;
}

const std::vector<Case>* CaseDatabase::partition(std::string_view signature) const
{
    auto it = partitions_.find(signature);
    return it == partitions_.end() ? nullptr : &it->second;
}

std::vector<const Case*> CaseDatabase::cases() const
{
    std::vector<const Case*> out;
    out.reserve(size_);
    for (const auto& [signature, part] : partitions_) {
        for (const auto& c : part) out.push_back(&c);
    }
    return out;
}

namespace {

using Scorer = void (*)(std::span<const Case>, const Problem&, const SimilarityConfig&, std::span<double>);

std::vector<ScoredCase> retrieve_with(Scorer scorer, const CaseDatabase& db, const Problem& query,
                                      const SimilarityConfig& config, SimTime now)
{
    for (const auto& a : config.attributes) {
        if (!query.section(a.kind).contains(a.name)) {
            throw EvaluationError("missing value for " + std::string(to_string(a.kind)) + "." + a.name +
                                  " in query");
        }
    }

    const auto* part = db.partition(db.schema().context_signature(query));
    if (!part || part->empty()) return {};

    std::vector<double> scores(part->size());
    scorer(*part, query, config, scores);

    std::vector<const std::vector<Action>*> vetoed;
    for (std::size_t i = 0; i < part->size(); ++i) {
        const auto& c = (*part)[i];
        if (c.outcome == Outcome::negative && !c.expired_at(now) && scores[i] >= config.cutoff) {
            vetoed.push_back(&c.solution);
        }
    }

    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < part->size(); ++i) {
        const auto& c = (*part)[i];
        if (c.outcome == Outcome::negative || c.expired_at(now) || scores[i] < config.cutoff) continue;
        const bool contraindicated =
            std::any_of(vetoed.begin(), vetoed.end(), [&](const auto* s) { return *s == c.solution; });
        if (!contraindicated) hits.push_back(i);
    }

    std::sort(hits.begin(), hits.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        const auto& ca = (*part)[a];
        const auto& cb = (*part)[b];
        if (ca.created_at != cb.created_at) return ca.created_at > cb.created_at;
        return ca.id < cb.id;
    });
    if (hits.size() > config.k) hits.resize(config.k);

    std::vector<ScoredCase> out;
    out.reserve(hits.size());
    for (auto i : hits) out.push_back({(*part)[i], scores[i]});
    return out;
}

}  // namespace

std::vector<ScoredCase> retrieve(const CaseDatabase& db, const Problem& query, const SimilarityConfig& config,
                                 SimTime now)
{
    return retrieve_with(&score_cases, db, query, config, now);
}

std::vector<ScoredCase> retrieve_serial(const CaseDatabase& db, const Problem& query,
                                        const SimilarityConfig& config, SimTime now)
{
    return retrieve_with(&score_cases_serial, db, query, config, now);
}

}  // namespace cbr
