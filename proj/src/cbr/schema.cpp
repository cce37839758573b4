#include "cbr/schema.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <set>
#include <utility>

namespace cbr {

namespace {

std::string qualified(AttributeKind kind, std::string_view name)
{
    return std::string(to_string(kind)) + "." + std::string(name);
}

bool is_numeric(const ValueDomain& d) { return std::holds_alternative<NumericDomain>(d); }
bool is_label_set(const ValueDomain& d) { return std::holds_alternative<LabelSetDomain>(d); }

void check_function_fits_domain(const AttributeSchema& attr)
{
    const auto where = qualified(attr.kind, attr.name);
    std::visit(
        [&](const auto& fn) {
            using F = std::decay_t<decltype(fn)>;
            if constexpr (std::is_same_v<F, local::Linear> || std::is_same_v<F, local::Ladder> ||
                          std::is_same_v<F, local::Maximum>) {
                if (!is_numeric(attr.domain)) {
                    throw ConfigurationError(where + ": " + std::string(function_name(attr.local_fn)) +
                                             " similarity requires a numeric domain");
                }
            }
            if constexpr (std::is_same_v<F, local::Intersection> || std::is_same_v<F, local::Contrast>) {
                if (!is_label_set(attr.domain)) {
                    throw ConfigurationError(where + ": " + std::string(function_name(attr.local_fn)) +
                                             " similarity requires a set-of-labels domain");
                }
            }
            if constexpr (std::is_same_v<F, local::Ladder>) {
                if (!(fn.step_width > 0.0)) throw ConfigurationError(where + ": ladder step_width must be > 0");
            }
            if constexpr (std::is_same_v<F, local::Contrast>) {
                if (!(fn.theta > 0.0) || fn.alpha < 0.0 || fn.beta < 0.0) {
                    throw ConfigurationError(where + ": contrast needs theta > 0 and alpha, beta >= 0");
                }
            }
            if constexpr (std::is_same_v<F, local::Maximum>) {
                if (std::get<NumericDomain>(attr.domain).min < 0.0) {
                    throw ConfigurationError(where + ": maximum similarity requires a non-negative domain");
                }
            }
        },
        attr.local_fn);
}

// FNV-1a, 64 bit.
std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

}  // namespace

std::string_view function_name(const LocalSimilaritySpec& spec)
{
    struct Namer {
        std::string_view operator()(const local::Equality&) const { return "equality"; }
        std::string_view operator()(const local::Linear&) const { return "linear"; }
        std::string_view operator()(const local::Ladder&) const { return "ladder"; }
        std::string_view operator()(const local::Intersection&) const { return "intersection"; }
        std::string_view operator()(const local::Contrast&) const { return "contrast"; }
        std::string_view operator()(const local::Maximum&) const { return "maximum"; }
    };
    return std::visit(Namer{}, spec);
}

std::string_view to_string(Objective objective)
{
    switch (objective) {
    case Objective::none: return "none";
    case Objective::minimize: return "minimize";
    case Objective::maximize: return "maximize";
    }
    return "?";
}

void check_value_in_domain(const Value& value, const ValueDomain& domain, std::string_view attribute)
{
    const std::string name(attribute);
    if (const auto* numeric = std::get_if<NumericDomain>(&domain)) {
        const auto* v = std::get_if<double>(&value);
        if (!v) throw ConfigurationError(name + ": expected a numeric value");
        if (!std::isfinite(*v) || *v < numeric->min || *v > numeric->max) {
            throw ConfigurationError(name + ": value " + format_number(*v) + " outside [" +
                                     format_number(numeric->min) + ", " + format_number(numeric->max) + "]");
        }
        return;
    }
    if (const auto* categorical = std::get_if<CategoricalDomain>(&domain)) {
        const auto* v = std::get_if<std::string>(&value);
        if (!v) throw ConfigurationError(name + ": expected a categorical label");
        if (std::find(categorical->labels.begin(), categorical->labels.end(), *v) == categorical->labels.end()) {
            throw ConfigurationError(name + ": unknown label '" + *v + "'");
        }
        return;
    }
    const auto& labels = std::get<LabelSetDomain>(domain).labels;
    const auto* v = std::get_if<LabelSet>(&value);
    if (!v) throw ConfigurationError(name + ": expected a set of labels");
    for (const auto& label : *v) {
        if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
            throw ConfigurationError(name + ": unknown label '" + label + "'");
        }
    }
}

CaseSchema::CaseSchema(std::vector<AttributeSchema> attributes, std::vector<std::string> action_catalog)
    : attributes_(std::move(attributes)), action_catalog_(std::move(action_catalog))
{
    std::set<std::pair<AttributeKind, std::string>> seen;
    double indexed_weight = 0.0;
    for (const auto& attr : attributes_) {
        const auto where = qualified(attr.kind, attr.name);
        if (attr.name.empty()) throw ConfigurationError("attribute with empty name");
        if (!seen.emplace(attr.kind, attr.name).second) throw ConfigurationError(where + ": declared twice");
        if (attr.kind == AttributeKind::static_attribute && attr.indexed) {
            throw ConfigurationError(where + ": static attributes cannot be indexed");
        }
        if (const auto* numeric = std::get_if<NumericDomain>(&attr.domain)) {
            if (!(numeric->min < numeric->max)) throw ConfigurationError(where + ": numeric domain needs min < max");
        }
        if (!std::isfinite(attr.weight) || attr.weight < 0.0) {
            throw ConfigurationError(where + ": weight must be a non-negative number");
        }
        check_function_fits_domain(attr);
        if (attr.indexed) indexed_weight += attr.weight;
    }
    if (!(indexed_weight > 0.0)) throw ConfigurationError("indexed attribute weights must sum to a positive value");
    if (action_catalog_.empty()) throw ConfigurationError("action catalog is empty");
}

const AttributeSchema* CaseSchema::find(AttributeKind kind, std::string_view name) const
{
    for (const auto& attr : attributes_) {
        if (attr.kind == kind && attr.name == name) return &attr;
    }
    return nullptr;
}

void CaseSchema::validate_problem(const Problem& problem) const
{
    for (auto kind : {AttributeKind::static_attribute, AttributeKind::contextual, AttributeKind::measurement,
                      AttributeKind::tolerance}) {
        for (const auto& [name, value] : problem.section(kind)) {
            const auto* attr = find(kind, name);
            if (!attr) throw ConfigurationError(qualified(kind, name) + ": not declared in the schema");
            check_value_in_domain(value, attr->domain, qualified(kind, name));
        }
    }
    for (const auto& attr : attributes_) {
        if (attr.indexed && !problem.section(attr.kind).contains(attr.name)) {
            throw ConfigurationError(qualified(attr.kind, attr.name) + ": indexed attribute missing");
        }
    }
}

void CaseSchema::validate_action(const Action& action) const
{
    if (std::find(action_catalog_.begin(), action_catalog_.end(), action.name) == action_catalog_.end()) {
        throw ConfigurationError("action '" + action.name + "' is not in the action catalog");
    }
}

void CaseSchema::validate_case(const Case& c) const
{
    validate_problem(c.problem);
    for (const auto& action : c.solution) validate_action(action);
    if (!(c.confidence >= 0.0 && c.confidence <= 1.0)) throw ConfigurationError("confidence outside [0, 1]");
}

std::string CaseSchema::context_signature(const Problem& problem) const
{
    std::string canonical;
    for (const auto& attr : attributes_) {
        const bool partitions = (attr.kind == AttributeKind::contextual && !attr.indexed) ||
                                attr.kind == AttributeKind::tolerance;
        if (!partitions) continue;
        const auto& section = problem.section(attr.kind);
        auto it = section.find(attr.name);
        canonical += qualified(attr.kind, attr.name);
        canonical += '=';
        canonical += it == section.end() ? std::string("<absent>") : to_string(it->second);
        canonical += ';';
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
    return buf;
}

}  // namespace cbr
