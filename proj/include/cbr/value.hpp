#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

namespace cbr {

using SimTime = double;
using CaseId = std::uint64_t;

using LabelSet = std::set<std::string>;

// An attribute value: numeric, categorical label, or a set of labels.
using Value = std::variant<double, std::string, LabelSet>;

using AttributeMap = std::map<std::string, Value>;

std::string to_string(const Value& value);

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

// Raised for schema, configuration and domain mismatches.
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a problem cannot be scored (missing attribute values etc.).
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cbr
