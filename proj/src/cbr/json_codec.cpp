#include "cbr/json_codec.hpp"

namespace cbr {

namespace {

std::string_view section_key(AttributeKind kind) { return to_string(kind); }

constexpr AttributeKind kSections[] = {AttributeKind::static_attribute, AttributeKind::contextual,
                                       AttributeKind::measurement, AttributeKind::tolerance};

template <typename T>
T field(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end()) throw ConfigurationError(std::string("missing field '") + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ConfigurationError(std::string("field '") + key + "' has the wrong type");
    }
}

}  // namespace

json to_json(const Value& value)
{
    if (const auto* d = std::get_if<double>(&value)) return *d;
    if (const auto* s = std::get_if<std::string>(&value)) return *s;
    json arr = json::array();
    for (const auto& label : std::get<LabelSet>(value)) arr.push_back(label);
    return arr;
}

Value value_from_json(const json& j)
{
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    if (j.is_array()) {
        LabelSet set;
        for (const auto& e : j) {
            if (!e.is_string()) throw ConfigurationError("label sets hold strings only");
            set.insert(e.get<std::string>());
        }
        return set;
    }
    throw ConfigurationError("unsupported attribute value " + j.dump());
}

Value value_from_json(const json& j, const ValueDomain& domain, std::string_view attribute)
{
    Value v;
    if (std::holds_alternative<NumericDomain>(domain)) {
        if (!j.is_number()) throw ConfigurationError(std::string(attribute) + ": expected a number");
        v = j.get<double>();
    } else if (std::holds_alternative<CategoricalDomain>(domain)) {
        if (!j.is_string()) throw ConfigurationError(std::string(attribute) + ": expected a label");
        v = j.get<std::string>();
    } else {
        if (!j.is_array()) throw ConfigurationError(std::string(attribute) + ": expected a list of labels");
        v = value_from_json(j);
    }
    check_value_in_domain(v, domain, attribute);
    return v;
}

json to_json(const AttributeMap& map)
{
    json out = json::object();
    for (const auto& [name, value] : map) out[name] = to_json(value);
    return out;
}

json to_json(const Problem& problem)
{
    json out = json::object();
    for (auto kind : kSections) out[std::string(section_key(kind))] = to_json(problem.section(kind));
    return out;
}

Problem problem_from_json(const json& j, const CaseSchema& schema)
{
    if (!j.is_object()) throw ConfigurationError("problem must be an object");
    Problem p;
    for (auto kind : kSections) {
        auto it = j.find(std::string(section_key(kind)));
        if (it == j.end()) continue;
        if (!it->is_object()) throw ConfigurationError("problem section must be an object");
        for (const auto& [name, value] : it->items()) {
            const auto* attr = schema.find(kind, name);
            const auto where = std::string(to_string(kind)) + "." + name;
            if (!attr) throw ConfigurationError(where + ": not declared in the schema");
            p.section(kind)[name] = value_from_json(value, attr->domain, where);
        }
    }
    return p;
}

json to_json(const Action& action)
{
    return {{"name", action.name}, {"parameters", to_json(action.parameters)}};
}

Action action_from_json(const json& j)
{
    Action a;
    a.name = field<std::string>(j, "name");
    if (auto it = j.find("parameters"); it != j.end()) {
        if (!it->is_object()) throw ConfigurationError("action parameters must be an object");
        for (const auto& [k, v] : it->items()) a.parameters[k] = value_from_json(v);
    }
    return a;
}

json to_json(const Case& c)
{
    json solution = json::array();
    for (const auto& a : c.solution) solution.push_back(to_json(a));
    return {
        {"id", c.id},
        {"problem", to_json(c.problem)},
        {"solution", std::move(solution)},
        {"outcome", std::string(to_string(c.outcome))},
        {"confidence", c.confidence},
        {"created_at", c.created_at},
        {"valid_until", c.valid_until ? json(*c.valid_until) : json(nullptr)},
        {"context_signature", c.context_signature},
    };
}

Case case_from_json(const json& j, const CaseSchema& schema)
{
    if (!j.is_object()) throw ConfigurationError("case record must be an object");
    Case c;
    c.id = field<CaseId>(j, "id");
    c.problem = problem_from_json(field<json>(j, "problem"), schema);
    for (const auto& a : field<json>(j, "solution")) c.solution.push_back(action_from_json(a));
    const auto outcome = parse_outcome(field<std::string>(j, "outcome"));
    if (!outcome) throw ConfigurationError("unknown outcome in case " + std::to_string(c.id));
    c.outcome = *outcome;
    c.confidence = field<double>(j, "confidence");
    c.created_at = field<double>(j, "created_at");
    const auto valid = field<json>(j, "valid_until");
    if (!valid.is_null()) c.valid_until = valid.get<double>();
    c.context_signature = field<std::string>(j, "context_signature");
    return c;
}

namespace {

json domain_to_json(const ValueDomain& domain)
{
    if (const auto* n = std::get_if<NumericDomain>(&domain)) {
        return {{"type", "numeric"}, {"min", n->min}, {"max", n->max}, {"unit", n->unit}};
    }
    if (const auto* c = std::get_if<CategoricalDomain>(&domain)) {
        return {{"type", "categorical"}, {"labels", c->labels}};
    }
    return {{"type", "set"}, {"labels", std::get<LabelSetDomain>(domain).labels}};
}

ValueDomain domain_from_json(const json& j)
{
    const auto type = field<std::string>(j, "type");
    if (type == "numeric") {
        return NumericDomain{field<double>(j, "min"), field<double>(j, "max"), j.value("unit", std::string{})};
    }
    if (type == "categorical") return CategoricalDomain{field<std::vector<std::string>>(j, "labels")};
    if (type == "set") return LabelSetDomain{field<std::vector<std::string>>(j, "labels")};
    throw ConfigurationError("unknown domain type '" + type + "'");
}

json function_to_json(const LocalSimilaritySpec& spec)
{
    json out = {{"name", std::string(function_name(spec))}};
    if (const auto* l = std::get_if<local::Ladder>(&spec)) out["step_width"] = l->step_width;
    if (const auto* c = std::get_if<local::Contrast>(&spec)) {
        out["theta"] = c->theta;
        out["alpha"] = c->alpha;
        out["beta"] = c->beta;
    }
    return out;
}

LocalSimilaritySpec function_from_json(const json& j)
{
    const auto name = field<std::string>(j, "name");
    if (name == "equality") return local::Equality{};
    if (name == "linear") return local::Linear{};
    if (name == "ladder") return local::Ladder{field<double>(j, "step_width")};
    if (name == "intersection") return local::Intersection{};
    if (name == "contrast") {
        return local::Contrast{field<double>(j, "theta"), field<double>(j, "alpha"), field<double>(j, "beta")};
    }
    if (name == "maximum") return local::Maximum{};
    throw ConfigurationError("unknown similarity function '" + name + "'");
}

Objective objective_from_string(std::string_view s)
{
    if (s == "minimize") return Objective::minimize;
    if (s == "maximize") return Objective::maximize;
    if (s == "none") return Objective::none;
    throw ConfigurationError("unknown objective '" + std::string(s) + "'");
}

}  // namespace

json to_json(const CaseSchema& schema)
{
    json attrs = json::array();
    for (const auto& a : schema.attributes()) {
        attrs.push_back({
            {"name", a.name},
            {"kind", std::string(to_string(a.kind))},
            {"domain", domain_to_json(a.domain)},
            {"function", function_to_json(a.local_fn)},
            {"weight", a.weight},
            {"indexed", a.indexed},
            {"objective", std::string(to_string(a.objective))},
        });
    }
    json actions = json::array();
    for (const auto& a : schema.action_catalog()) actions.push_back(a);
    return {{"attributes", std::move(attrs)}, {"actions", std::move(actions)}};
}

CaseSchema schema_from_json(const json& j)
{
    std::vector<AttributeSchema> attrs;
    for (const auto& a : field<json>(j, "attributes")) {
        AttributeSchema s;
        s.name = field<std::string>(a, "name");
        const auto kind = parse_attribute_kind(field<std::string>(a, "kind"));
        if (!kind) throw ConfigurationError(s.name + ": unknown attribute kind");
        s.kind = *kind;
        s.domain = domain_from_json(field<json>(a, "domain"));
        s.local_fn = function_from_json(field<json>(a, "function"));
        s.weight = field<double>(a, "weight");
        s.indexed = field<bool>(a, "indexed");
        s.objective = objective_from_string(a.value("objective", std::string("none")));
        attrs.push_back(std::move(s));
    }
    return CaseSchema(std::move(attrs), field<std::vector<std::string>>(j, "actions"));
}

json to_json(const EvaluationReport& report)
{
    json warnings = json::array();
    for (const auto& w : report.warnings) {
        warnings.push_back({{"attribute", w.attribute},
                            {"value", w.value},
                            {"bound", w.bound},
                            {"violation", w.violation},
                            {"weight", w.weight}});
    }
    return {{"score", report.score}, {"warnings", std::move(warnings)}};
}

json to_json(const LocalScore& score)
{
    return {{"attribute", score.name},
            {"kind", std::string(to_string(score.kind))},
            {"query", to_json(score.query_value)},
            {"case", to_json(score.case_value)},
            {"local_similarity", score.similarity},
            {"weight", score.weight}};
}

}  // namespace cbr
