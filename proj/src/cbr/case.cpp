#include "cbr/case.hpp"

#include "util/number_format.hpp"

namespace cbr {

std::string format_number(double value) { return util::format_number(value); }

std::string to_string(const Value& value)
{
    struct Printer {
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(const std::string& v) const { return v; }
        std::string operator()(const LabelSet& v) const
        {
            std::string out = "{";
            bool first = true;
            for (const auto& label : v) {
                if (!first) out += ',';
                out += label;
                first = false;
            }
            return out + "}";
        }
    };
    return std::visit(Printer{}, value);
}

std::string_view to_string(AttributeKind kind)
{
    switch (kind) {
    case AttributeKind::static_attribute: return "static";
    case AttributeKind::contextual: return "contextual";
    case AttributeKind::measurement: return "measurement";
    case AttributeKind::tolerance: return "tolerance";
    }
    return "?";
}

std::optional<AttributeKind> parse_attribute_kind(std::string_view text)
{
    if (text == "static") return AttributeKind::static_attribute;
    if (text == "contextual") return AttributeKind::contextual;
    if (text == "measurement") return AttributeKind::measurement;
    if (text == "tolerance") return AttributeKind::tolerance;
    return std::nullopt;
}

AttributeMap& Problem::section(AttributeKind kind)
{
    switch (kind) {
    case AttributeKind::static_attribute: return static_attributes;
    case AttributeKind::contextual: return contextual;
    case AttributeKind::measurement: return measurements;
    case AttributeKind::tolerance: return tolerances;
    }
    return measurements;
}

const AttributeMap& Problem::section(AttributeKind kind) const
{
    return const_cast<Problem*>(this)->section(kind);
}

std::string to_string(const Action& action)
{
    std::string out = action.name + "(";
    bool first = true;
    for (const auto& [key, value] : action.parameters) {
        if (!first) out += ',';
        // Single-parameter actions print as Name(value).
        if (action.parameters.size() == 1) {
            out += to_string(value);
        } else {
            out += key + "=" + to_string(value);
        }
        first = false;
    }
    return out + ")";
}

std::string_view to_string(Outcome outcome)
{
    switch (outcome) {
    case Outcome::positive: return "positive";
    case Outcome::negative: return "negative";
    case Outcome::unvalidated: return "unvalidated";
    }
    return "?";
}

std::optional<Outcome> parse_outcome(std::string_view text)
{
    if (text == "positive") return Outcome::positive;
    if (text == "negative") return Outcome::negative;
    if (text == "unvalidated") return Outcome::unvalidated;
    return std::nullopt;
}

}  // namespace cbr
