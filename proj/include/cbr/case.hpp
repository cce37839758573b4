#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbr/value.hpp"

namespace cbr {

enum class AttributeKind { static_attribute, contextual, measurement, tolerance };

std::string_view to_string(AttributeKind kind);
std::optional<AttributeKind> parse_attribute_kind(std::string_view text);

// Problem part of a case: static attributes, contextual attributes,
// measurements and tolerances, each keyed by attribute name.
struct Problem {
    AttributeMap static_attributes;
    AttributeMap contextual;
    AttributeMap measurements;
    AttributeMap tolerances;

    AttributeMap& section(AttributeKind kind);
    const AttributeMap& section(AttributeKind kind) const;

    bool operator==(const Problem&) const = default;
};

struct Action {
    std::string name;
    AttributeMap parameters;

    bool operator==(const Action&) const = default;
};

std::string to_string(const Action& action);

enum class Outcome { positive, negative, unvalidated };

std::string_view to_string(Outcome outcome);
std::optional<Outcome> parse_outcome(std::string_view text);

struct Case {
    CaseId id = 0;  // 0 until the case database assigns one
    Problem problem;
    std::vector<Action> solution;
    Outcome outcome = Outcome::unvalidated;
    double confidence = 1.0;
    SimTime created_at = 0.0;
    std::optional<SimTime> valid_until;  // empty = never expires
    std::string context_signature;

    bool expired_at(SimTime now) const { return valid_until && *valid_until < now; }

    bool operator==(const Case&) const = default;
};

}  // namespace cbr
