#pragma once

// Small schemas shared by the unit tests.

#include "cbr/case_database.hpp"
#include "cbr/similarity.hpp"

namespace fixture {

// Indexed: contextual.bam (equality, 40), measurement throughput/blocking
// (linear, 30), devolution/preemption (linear, 20). Plus a static capacity,
// a non-indexed utilization, and tolerances for the evaluated measurements.
inline cbr::CaseSchema default_schema()
{
    using namespace cbr;
    const NumericDomain unit{0.0, 1.0, ""};
    std::vector<AttributeSchema> a{
        {"capacity", AttributeKind::static_attribute, NumericDomain{0, 1000, "Mbps"}, local::Linear{}, 0, false,
         Objective::none},
        {"bam", AttributeKind::contextual, CategoricalDomain{{"MAM", "RDM", "ATCS"}}, local::Equality{}, 40, true,
         Objective::none},
        {"throughput", AttributeKind::measurement, unit, local::Linear{}, 30, true, Objective::maximize},
        {"blocking", AttributeKind::measurement, unit, local::Linear{}, 30, true, Objective::minimize},
        {"devolution", AttributeKind::measurement, unit, local::Linear{}, 20, true, Objective::minimize},
        {"preemption", AttributeKind::measurement, unit, local::Linear{}, 20, true, Objective::minimize},
        {"utilization", AttributeKind::measurement, unit, local::Linear{}, 0, false, Objective::none},
        {"blocking", AttributeKind::tolerance, unit, local::Linear{}, 0, false, Objective::none},
        {"devolution", AttributeKind::tolerance, unit, local::Linear{}, 0, false, Objective::none},
        {"preemption", AttributeKind::tolerance, unit, local::Linear{}, 0, false, Objective::none},
    };
    return CaseSchema(std::move(a), {"SwitchBAM"});
}

inline cbr::SimilarityConfig default_config(const cbr::CaseSchema& schema)
{
    return cbr::SimilarityConfig::from_schema(schema, 0.96, 0.985, 5);
}

inline cbr::Problem problem(const std::string& bam, double throughput = 1.0, double blocking = 0.0,
                            double devolution = 0.0, double preemption = 0.0)
{
    cbr::Problem p;
    p.static_attributes["capacity"] = 100.0;
    p.contextual["bam"] = bam;
    p.measurements["throughput"] = throughput;
    p.measurements["blocking"] = blocking;
    p.measurements["devolution"] = devolution;
    p.measurements["preemption"] = preemption;
    p.measurements["utilization"] = 0.3;
    p.tolerances["blocking"] = 0.0;
    p.tolerances["devolution"] = 0.0;
    p.tolerances["preemption"] = 0.0;
    return p;
}

inline cbr::Action switch_to(const std::string& target)
{
    return {"SwitchBAM", {{"target", target}}};
}

inline cbr::Case make_case(cbr::Problem p, const std::string& target, cbr::Outcome outcome = cbr::Outcome::positive,
                           double created_at = 0.0)
{
    cbr::Case c;
    c.problem = std::move(p);
    c.solution = {switch_to(target)};
    c.outcome = outcome;
    c.created_at = created_at;
    return c;
}

}  // namespace fixture
