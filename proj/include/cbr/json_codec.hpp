#pragma once

#include "json.hpp"

#include "cbr/case.hpp"
#include "cbr/evaluation.hpp"
#include "cbr/schema.hpp"
#include "cbr/similarity.hpp"

namespace cbr {

using json = nlohmann::json;

json to_json(const Value& value);
// Untyped decode: number, string, or array of strings.
Value value_from_json(const json& j);
// Decode against a declared domain; throws ConfigurationError on mismatch.
Value value_from_json(const json& j, const ValueDomain& domain, std::string_view attribute);

json to_json(const AttributeMap& map);
json to_json(const Problem& problem);
Problem problem_from_json(const json& j, const CaseSchema& schema);

json to_json(const Action& action);
Action action_from_json(const json& j);

json to_json(const Case& c);
Case case_from_json(const json& j, const CaseSchema& schema);

json to_json(const CaseSchema& schema);
CaseSchema schema_from_json(const json& j);

json to_json(const EvaluationReport& report);
json to_json(const LocalScore& score);

}  // namespace cbr
