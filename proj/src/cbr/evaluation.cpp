#include "cbr/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace cbr {

EvaluationReport evaluate(const CaseSchema& schema, const EvaluationWeights& weights,
                          const AttributeMap& measurements, const AttributeMap& tolerances)
{
    EvaluationReport report;
    double total = 0;
    double penalty = 0;
    for (const auto& [name, weight] : weights) {
        if (!std::isfinite(weight) || weight < 0) {
            throw ConfigurationError("evaluation weight of '" + name + "' must be non-negative");
        }
        if (weight == 0) continue;

        const auto* attr = schema.find(AttributeKind::measurement, name);
        if (!attr) throw ConfigurationError("evaluation weight for undeclared measurement '" + name + "'");
        const auto* domain = std::get_if<NumericDomain>(&attr->domain);
        if (!domain || attr->objective == Objective::none) {
            throw ConfigurationError("measurement '" + name + "' needs a numeric domain and an objective");
        }

        auto m = measurements.find(name);
        if (m == measurements.end()) throw EvaluationError("missing measurement '" + name + "'");
        auto t = tolerances.find(name);
        if (t == tolerances.end()) throw EvaluationError("missing tolerance for '" + name + "'");
        const auto* x = std::get_if<double>(&m->second);
        const auto* bound = std::get_if<double>(&t->second);
        if (!x || !bound) throw EvaluationError("measurement and tolerance of '" + name + "' must be numeric");

        const double excess = attr->objective == Objective::minimize ? *x - *bound : *bound - *x;
        const double v = std::clamp(excess / domain->width(), 0.0, 1.0);
        total += weight;
        penalty += weight * v;
        if (v > 0) report.warnings.push_back({name, *x, *bound, v, weight});
    }
    if (!(total > 0)) throw ConfigurationError("evaluation weights must sum to a positive value");
    report.score = std::clamp(1.0 - penalty / total, 0.0, 1.0);
    return report;
}

}  // namespace cbr
