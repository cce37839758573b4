#pragma once

#include <map>
#include <string>
#include <vector>

#include "cbr/schema.hpp"

namespace cbr {

using EvaluationWeights = std::map<std::string, double>;

struct Violation {
    std::string attribute;
    double value = 0.0;
    double bound = 0.0;
    double violation = 0.0;  // normalized by the measurement's domain width, in (0, 1]
    double weight = 0.0;
};

struct EvaluationReport {
    double score = 1.0;
    std::vector<Violation> warnings;
};

// Compares measurements against their tolerance bounds.
//
// Minimize-type measurements violate when above the bound, maximize-type when
// below it. Each violation is clamped to [0, 1] after dividing by the
// measurement's domain width; score = 1 - sum(w * v) / sum(w). Attributes with
// zero weight are ignored and may be absent.
EvaluationReport evaluate(const CaseSchema& schema, const EvaluationWeights& weights,
                          const AttributeMap& measurements, const AttributeMap& tolerances);

}  // namespace cbr
