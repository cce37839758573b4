#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cbr/schema.hpp"

namespace cbr {

// Local similarity of two values under one attribute's function, in [0, 1].
// Throws ConfigurationError when the value types do not fit the function.
double local_similarity(const LocalSimilaritySpec& spec, const Value& a, const Value& b,
                        const ValueDomain& domain);

struct WeightedAttribute {
    AttributeKind kind = AttributeKind::measurement;
    std::string name;
    LocalSimilaritySpec local_fn = local::Linear{};
    ValueDomain domain = NumericDomain{};
    double weight = 0.0;
};

// WkNN configuration: per-attribute (function, weight) table over the indexed
// attributes plus the retrieval and retention thresholds.
struct SimilarityConfig {
    std::vector<WeightedAttribute> attributes;
    double cutoff = 0.96;
    double equivalence = 0.985;
    std::size_t k = 5;

    // Table built from the schema's indexed attributes.
    static SimilarityConfig from_schema(const CaseSchema& schema, double cutoff, double equivalence,
                                        std::size_t k);

    double total_weight() const;

    // Throws ConfigurationError.
    void validate() const;
};

// Weighted mean of local similarities over the configured attributes.
// Throws EvaluationError naming a missing attribute.
double global_similarity(const SimilarityConfig& config, const Problem& query, const Problem& other);

struct LocalScore {
    AttributeKind kind = AttributeKind::measurement;
    std::string name;
    Value query_value;
    Value case_value;
    double similarity = 0.0;
    double weight = 0.0;
};

// Per-attribute terms of global_similarity, in configuration order.
std::vector<LocalScore> similarity_breakdown(const SimilarityConfig& config, const Problem& query,
                                             const Problem& other);

}  // namespace cbr
