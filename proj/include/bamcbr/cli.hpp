#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bamcbr/report.hpp"

namespace bamcbr::cli {

struct RunReport {
    std::string scenario_id;
    std::uint64_t seed = 0;
    std::filesystem::path metrics;
    std::filesystem::path decisions;
    std::filesystem::path trace;
    std::filesystem::path cases;
    bamsim::Measurements total;
    bamsim::BamModel final_model = bamsim::BamModel::mam;
    RunStats stats;
};

// Runs the control loop and writes metrics.csv, decisions.csv, trace.csv and
// cases.jsonl into out_dir. With `db`, the case base is loaded from that file
// when it exists and saved back afterwards.
RunReport cmd_run(const std::filesystem::path& scenario, std::optional<std::uint64_t> seed,
                  const std::filesystem::path& out_dir, const std::optional<std::filesystem::path>& db = std::nullopt);

// Throws std::invalid_argument naming an unknown model.
std::vector<bamsim::BamModel> parse_models(const std::string& csv);
std::vector<ComparisonRow> cmd_compare(const std::filesystem::path& scenario, std::span<const bamsim::BamModel> models);

void cmd_db_ls(const std::filesystem::path& db, std::ostream& out);
// Throws std::out_of_range for an unknown id.
void cmd_db_show(const std::filesystem::path& db, std::uint64_t id, std::ostream& out);
void cmd_db_export(const std::filesystem::path& db, const std::filesystem::path& dest);

// Entry point shared by the executable and the tests. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bamcbr::cli
