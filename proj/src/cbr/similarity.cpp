#include "cbr/similarity.hpp"

#include <algorithm>
#include <cmath>

namespace cbr {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

const double& as_number(const Value& v, std::string_view fn)
{
    if (const auto* d = std::get_if<double>(&v)) return *d;
    throw ConfigurationError(std::string(fn) + " similarity needs numeric values, got '" + to_string(v) + "'");
}

const LabelSet& as_set(const Value& v, std::string_view fn)
{
    if (const auto* s = std::get_if<LabelSet>(&v)) return *s;
    throw ConfigurationError(std::string(fn) + " similarity needs label sets, got '" + to_string(v) + "'");
}

const NumericDomain& as_numeric_domain(const ValueDomain& d, std::string_view fn)
{
    if (const auto* n = std::get_if<NumericDomain>(&d)) return *n;
    throw ConfigurationError(std::string(fn) + " similarity needs a numeric domain");
}

struct SetCounts {
    double common = 0;
    double only_a = 0;
    double only_b = 0;
};

SetCounts count(const LabelSet& a, const LabelSet& b)
{
    SetCounts out;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++out.only_a;
            ++ia;
        } else if (*ib < *ia) {
            ++out.only_b;
            ++ib;
        } else {
            ++out.common;
            ++ia;
            ++ib;
        }
    }
    out.only_a += static_cast<double>(std::distance(ia, a.end()));
    out.only_b += static_cast<double>(std::distance(ib, b.end()));
    return out;
}

}  // namespace

double local_similarity(const LocalSimilaritySpec& spec, const Value& a, const Value& b, const ValueDomain& domain)
{
    return std::visit(
        [&](const auto& fn) -> double {
            using F = std::decay_t<decltype(fn)>;
            constexpr auto name = [] {
                if constexpr (std::is_same_v<F, local::Equality>) return "equality";
                else if constexpr (std::is_same_v<F, local::Linear>) return "linear";
                else if constexpr (std::is_same_v<F, local::Ladder>) return "ladder";
                else if constexpr (std::is_same_v<F, local::Intersection>) return "intersection";
                else if constexpr (std::is_same_v<F, local::Contrast>) return "contrast";
                else return "maximum";
            }();

            if constexpr (std::is_same_v<F, local::Equality>) {
                if (a.index() != b.index()) {
                    throw ConfigurationError("equality similarity on values of different types");
                }
                return a == b ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<F, local::Linear>) {
                const auto& d = as_numeric_domain(domain, name);
                return clamp01(1.0 - std::abs(as_number(a, name) - as_number(b, name)) / d.width());
            } else if constexpr (std::is_same_v<F, local::Ladder>) {
                as_numeric_domain(domain, name);
                return std::abs(as_number(a, name) - as_number(b, name)) <= fn.step_width ? 1.0 : 0.0;
            } else if constexpr (std::is_same_v<F, local::Intersection>) {
                const auto c = count(as_set(a, name), as_set(b, name));
                const double uni = c.common + c.only_a + c.only_b;
                return uni == 0 ? 1.0 : c.common / uni;
            } else if constexpr (std::is_same_v<F, local::Contrast>) {
                const auto c = count(as_set(a, name), as_set(b, name));
                const double scale = fn.theta * (c.common + c.only_a + c.only_b);
                if (scale == 0) return 1.0;
                const double raw = fn.theta * c.common - fn.alpha * c.only_a - fn.beta * c.only_b;
                return std::clamp(raw, 0.0, scale) / scale;
            } else {
                as_numeric_domain(domain, name);
                const double x = as_number(a, name);
                const double y = as_number(b, name);
                if (x < 0 || y < 0) throw ConfigurationError("maximum similarity needs non-negative values");
                const double hi = std::max(x, y);
                return hi == 0 ? 1.0 : clamp01(std::min(x, y) / hi);
            }
        },
        spec);
}

SimilarityConfig SimilarityConfig::from_schema(const CaseSchema& schema, double cutoff, double equivalence,
                                               std::size_t k)
{
    SimilarityConfig config;
    for (const auto& attr : schema.attributes()) {
        if (!attr.indexed) continue;
        config.attributes.push_back({attr.kind, attr.name, attr.local_fn, attr.domain, attr.weight});
    }
    config.cutoff = cutoff;
    config.equivalence = equivalence;
    config.k = k;
    config.validate();
    return config;
}

double SimilarityConfig::total_weight() const
{
    double total = 0;
    for (const auto& a : attributes) total += a.weight;
    return total;
}

void SimilarityConfig::validate() const
{
    if (attributes.empty()) throw ConfigurationError("similarity config has no attributes");
    for (const auto& a : attributes) {
        if (a.kind == AttributeKind::static_attribute) {
            throw ConfigurationError("static attribute '" + a.name + "' cannot take part in similarity");
        }
        if (!std::isfinite(a.weight) || a.weight < 0) {
            throw ConfigurationError("weight of '" + a.name + "' must be non-negative");
        }
    }
    if (!(total_weight() > 0)) throw ConfigurationError("similarity weights must sum to a positive value");
    if (!(cutoff >= 0 && cutoff <= 1)) throw ConfigurationError("cutoff must lie in [0, 1]");
    if (!(equivalence >= 0 && equivalence <= 1)) throw ConfigurationError("equivalence must lie in [0, 1]");
    if (equivalence < cutoff) throw ConfigurationError("equivalence threshold must be >= cutoff");
    if (k == 0) throw ConfigurationError("k must be positive");
}

namespace {

const Value& require(const Problem& p, const WeightedAttribute& a, std::string_view which)
{
    const auto& section = p.section(a.kind);
    auto it = section.find(a.name);
    if (it == section.end()) {
        throw EvaluationError("missing value for " + std::string(to_string(a.kind)) + "." + a.name + " in " +
                              std::string(which));
    }
    return it->second;
}

}  // namespace

double global_similarity(const SimilarityConfig& config, const Problem& query, const Problem& other)
{
    double weighted = 0;
    double total = 0;
    for (const auto& a : config.attributes) {
        const auto& qv = require(query, a, "query");
        const auto& cv = require(other, a, "case");
        weighted += a.weight * local_similarity(a.local_fn, qv, cv, a.domain);
        total += a.weight;
    }
    if (!(total > 0)) throw ConfigurationError("similarity weights must sum to a positive value");
    return clamp01(weighted / total);
}

std::vector<LocalScore> similarity_breakdown(const SimilarityConfig& config, const Problem& query,
                                             const Problem& other)
{
    std::vector<LocalScore> out;
    out.reserve(config.attributes.size());
    for (const auto& a : config.attributes) {
        const auto& qv = require(query, a, "query");
        const auto& cv = require(other, a, "case");
        out.push_back({a.kind, a.name, qv, cv, local_similarity(a.local_fn, qv, cv, a.domain), a.weight});
    }
    return out;
}

}  // namespace cbr
