#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbr/case.hpp"
#include "cbr/schema.hpp"
#include "cbr/similarity.hpp"

namespace cbr {

enum class RetainStatus { stored, rejected_equivalent, rejected_unvalidated };

std::string_view to_string(RetainStatus status);

struct RetainResult {
    RetainStatus status = RetainStatus::stored;
    CaseId id = 0;             // assigned id when stored
    CaseId equivalent_to = 0;  // blocking case when rejected_equivalent
};

struct RetentionPolicy {
    bool retain_unvalidated = false;
};

// Case store partitioned by context signature, insertion-ordered within a
// partition. Single writer: retain/forget/seed/insert must not run
// concurrently with anything else; const members are safe to share.
class CaseDatabase {
public:
    explicit CaseDatabase(CaseSchema schema);

    const CaseSchema& schema() const { return schema_; }

    // Stores `c` unless an existing same-partition, same-outcome case is at
    // least `config.equivalence` similar. valid_until = created_at + ttl.
    RetainResult retain(Case c, const SimilarityConfig& config, std::optional<SimTime> ttl,
                        const RetentionPolicy& policy = {});

    // Removes every case with valid_until < now.
    std::size_t forget(SimTime now);

    // Retains each premise as positive, confidence 1, no expiry.
    std::size_t seed_premises(std::vector<Case> premises, const SimilarityConfig& config);

    // Inserts a case exactly as given (import path). Keeps its id.
    void insert_verbatim(Case c);

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    const Case* find(CaseId id) const;
    const std::vector<Case>* partition(std::string_view signature) const;
    const std::map<std::string, std::vector<Case>, std::less<>>& partitions() const { return partitions_; }

    // All cases, partitions in signature order, insertion order within.
    std::vector<const Case*> cases() const;

    CaseId next_id() const { return next_id_; }
    void advance_next_id(CaseId next) { next_id_ = std::max(next_id_, next); }

private:
    CaseSchema schema_;
    std::map<std::string, std::vector<Case>, std::less<>> partitions_;
    std::size_t size_ = 0;
    CaseId next_id_ = 1;
};

struct ScoredCase {
    Case match;
    double similarity = 0.0;
};

// Recover step. Returns unexpired, non-negative cases from the query's
// partition with similarity >= cutoff, sorted by similarity descending, then
// created_at descending, then id ascending, truncated to k. A negative case at
// similarity >= cutoff vetoes every positive case with the same action list.
// Scoring runs on the OpenMP kernel.
std::vector<ScoredCase> retrieve(const CaseDatabase& db, const Problem& query,
                                 const SimilarityConfig& config, SimTime now);

// Same contract, single-threaded scoring. Reference for tests and benchmarks.
std::vector<ScoredCase> retrieve_serial(const CaseDatabase& db, const Problem& query,
                                        const SimilarityConfig& config, SimTime now);

}  // namespace cbr
