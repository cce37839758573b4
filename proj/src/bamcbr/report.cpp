#include "bamcbr/report.hpp"

#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "util/number_format.hpp"

namespace bamcbr {

using util::format_number;

std::vector<ComparisonRow> compare_models(const bamsim::Scenario& scenario, const BamCbrConfig& cfg,
                                          std::span<const bamsim::BamModel> models)
{
    bamsim::validate_scenario(scenario);
    cfg.validate();
    const auto n = static_cast<int>(models.size()) + 1;
    std::vector<ComparisonRow> rows(static_cast<std::size_t>(n));
    std::exception_ptr error;

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            auto& row = rows[static_cast<std::size_t>(i)];
            if (i + 1 < n) {
                const auto model = models[static_cast<std::size_t>(i)];
                row.label = bamsim::to_string(model);
                row.total = bamsim::run_scenario(scenario, model).total;
            } else {
                ControlLoop loop(scenario, cfg);
                loop.run();
                row.label = "CBR";
                row.total = loop.simulator().measure(0, scenario.duration);
            }
        } catch (...) {
#pragma omp critical(compare_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return rows;
}

std::string format_comparison(std::span<const ComparisonRow> rows)
{
    std::ostringstream out;
    out << std::left << std::setw(8) << "model" << std::right << std::setw(12) << "blocking" << std::setw(13)
        << "utilization" << std::setw(13) << "preemptions" << std::setw(13) << "devolutions" << '\n';
    out << std::fixed;
    for (const auto& r : rows) {
        out << std::left << std::setw(8) << r.label << std::right << std::setprecision(6) << std::setw(12)
            << r.total.blocking << std::setw(13) << r.total.utilization << std::setw(13) << r.total.preemptions
            << std::setw(13) << r.total.devolutions << '\n';
    }
    return out.str();
}

void write_metrics_csv(std::span<const WindowRecord> windows, std::ostream& out)
{
    out << "window_start,window_end,model,utilization,throughput,blocking,requests,blocked,preemptions,devolutions,"
           "score\n";
    for (const auto& w : windows) {
        out << format_number(w.m.start) << ',' << format_number(w.m.end) << ',' << bamsim::to_string(w.model) << ','
            << format_number(w.m.utilization) << ',' << format_number(w.m.throughput) << ','
            << format_number(w.m.blocking) << ',' << w.m.requests << ',' << w.m.blocked << ',' << w.m.preemptions
            << ',' << w.m.devolutions << ',' << format_number(w.score) << '\n';
    }
}

void write_decisions_csv(std::span<const DecisionRecord> decisions, std::ostream& out)
{
    out << "time,trigger,model,case_id,similarity,origin,action,before_score,after_score,outcome,retained,"
           "stored_case\n";
    for (const auto& d : decisions) {
        out << format_number(d.time) << ',' << to_string(d.trigger) << ',' << bamsim::to_string(d.model) << ',';
        if (d.source_case) out << *d.source_case;
        out << ',';
        if (d.source_case) out << format_number(d.similarity);
        out << ',' << d.origin << ',' << d.action << ',' << format_number(d.before_score) << ',';
        if (d.after_score) out << format_number(*d.after_score);
        out << ',' << d.outcome << ',' << (d.retained ? 1 : 0) << ',';
        if (d.stored_case) out << *d.stored_case;
        out << '\n';
    }
}

}  // namespace bamcbr
