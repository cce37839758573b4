#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cbr/case.hpp"

namespace cbr {

struct NumericDomain {
    double min = 0.0;
    double max = 1.0;
    std::string unit;

    double width() const { return max - min; }
};

struct CategoricalDomain {
    std::vector<std::string> labels;
};

struct LabelSetDomain {
    std::vector<std::string> labels;
};

using ValueDomain = std::variant<NumericDomain, CategoricalDomain, LabelSetDomain>;

namespace local {

struct Equality {};
struct Linear {};
struct Ladder {
    double step_width = 1.0;
};
struct Intersection {};
// Normalized Tversky contrast.
struct Contrast {
    double theta = 1.0;
    double alpha = 0.5;
    double beta = 0.5;
};
struct Maximum {};

}  // namespace local

using LocalSimilaritySpec = std::variant<local::Equality, local::Linear, local::Ladder,
                                         local::Intersection, local::Contrast, local::Maximum>;

std::string_view function_name(const LocalSimilaritySpec& spec);

// Direction of an objective tied to a measurement; drives evaluation.
enum class Objective { none, minimize, maximize };

std::string_view to_string(Objective objective);

struct AttributeSchema {
    std::string name;
    AttributeKind kind = AttributeKind::measurement;
    ValueDomain domain = NumericDomain{};
    LocalSimilaritySpec local_fn = local::Linear{};
    double weight = 0.0;
    bool indexed = false;
    Objective objective = Objective::none;
};

// Declared attributes plus the action catalog of one technological domain.
//
// Attributes are keyed by (kind, name): a measurement and the tolerance that
// bounds it share a name.
class CaseSchema {
public:
    CaseSchema() = default;
    CaseSchema(std::vector<AttributeSchema> attributes, std::vector<std::string> action_catalog);

    std::span<const AttributeSchema> attributes() const { return attributes_; }
    std::span<const std::string> action_catalog() const { return action_catalog_; }

    const AttributeSchema* find(AttributeKind kind, std::string_view name) const;

    // Throws ConfigurationError naming the offending attribute.
    void validate_problem(const Problem& problem) const;
    void validate_action(const Action& action) const;
    void validate_case(const Case& c) const;

    // Digest of the non-indexed contextual values and the tolerance values.
    // Cases with different signatures live in different partitions.
    std::string context_signature(const Problem& problem) const;

private:
    std::vector<AttributeSchema> attributes_;
    std::vector<std::string> action_catalog_;
};

// Throws ConfigurationError if the value does not belong to the domain.
void check_value_in_domain(const Value& value, const ValueDomain& domain, std::string_view attribute);

}  // namespace cbr
