#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bamcbr/loop.hpp"

namespace bamcbr {

struct ComparisonRow {
    std::string label;  // model name, or "CBR"
    bamsim::Measurements total;
};

// Runs the scenario's seeded trace under each fixed model, then under CBR
// control starting from the scenario's initial model. Rows follow `models`,
// with the CBR row last. Runs are independent and execute in parallel.
std::vector<ComparisonRow> compare_models(const bamsim::Scenario& scenario, const BamCbrConfig& cfg,
                                          std::span<const bamsim::BamModel> models);

// Columns: model, blocking, utilization, preemptions, devolutions.
std::string format_comparison(std::span<const ComparisonRow> rows);

// window_start,window_end,model,utilization,throughput,blocking,requests,blocked,preemptions,devolutions,score
void write_metrics_csv(std::span<const WindowRecord> windows, std::ostream& out);
// time,trigger,model,case_id,similarity,origin,action,before_score,after_score,outcome,retained,stored_case
void write_decisions_csv(std::span<const DecisionRecord> decisions, std::ostream& out);

}  // namespace bamcbr
