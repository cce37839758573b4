#include "bamcbr/cli.hpp"

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "bamcbr/service/server.hpp"
#include "cbr/case_io.hpp"
#include "cbr/json_codec.hpp"
#include "util/number_format.hpp"

namespace bamcbr::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    return out;
}

std::optional<cbr::CaseDatabase> load_db_if_present(const std::optional<fs::path>& db)
{
    if (!db || !fs::exists(*db)) return std::nullopt;
    return cbr::load_database(*db);
}

cbr::CaseDatabase load_db(const fs::path& db)
{
    if (!fs::exists(db)) throw std::runtime_error(db.string() + ": no such database file");
    return cbr::load_database(db);
}

std::string action_list(const std::vector<cbr::Action>& actions)
{
    std::string out;
    for (const auto& a : actions) {
        if (!out.empty()) out += ';';
        out += cbr::to_string(a);
    }
    return out;
}

}  // namespace

RunReport cmd_run(const fs::path& scenario_path, std::optional<std::uint64_t> seed, const fs::path& out_dir,
                  const std::optional<fs::path>& db)
{
    auto file = load_scenario(scenario_path);
    if (seed) file.scenario.seed = *seed;

    ControlLoop loop(file.scenario, file.cbr, load_db_if_present(db));
    loop.run();

    fs::create_directories(out_dir);
    RunReport r;
    r.scenario_id = file.scenario.id;
    r.seed = file.scenario.seed;
    r.metrics = out_dir / "metrics.csv";
    r.decisions = out_dir / "decisions.csv";
    r.trace = out_dir / "trace.csv";
    r.cases = out_dir / "cases.jsonl";
    {
        auto out = open_out(r.metrics);
        write_metrics_csv(loop.windows(), out);
    }
    {
        auto out = open_out(r.decisions);
        write_decisions_csv(loop.decisions(), out);
    }
    {
        auto out = open_out(r.trace);
        bamsim::write_trace_csv(loop.simulator().trace(), out);
    }
    cbr::save_database(loop.engine().database(), r.cases);
    if (db) cbr::save_database(loop.engine().database(), *db);

    r.total = loop.simulator().measure(0, file.scenario.duration);
    r.final_model = loop.model();
    r.stats = loop.stats();
    return r;
}

std::vector<bamsim::BamModel> parse_models(const std::string& csv)
{
    std::vector<bamsim::BamModel> out;
    std::stringstream in(csv);
    std::string item;
    while (std::getline(in, item, ',')) {
        const auto m = bamsim::parse_model(item);
        if (!m) throw std::invalid_argument("unknown model '" + item + "'");
        out.push_back(*m);
    }
    if (out.empty()) throw std::invalid_argument("no models given");
    return out;
}

std::vector<ComparisonRow> cmd_compare(const fs::path& scenario, std::span<const bamsim::BamModel> models)
{
    const auto file = load_scenario(scenario);
    return compare_models(file.scenario, file.cbr, models);
}

void cmd_db_ls(const fs::path& db_path, std::ostream& out)
{
    const auto db = load_db(db_path);
    out << std::left << std::setw(6) << "id" << std::setw(13) << "outcome" << std::setw(12) << "confidence"
        << std::setw(12) << "created_at" << std::setw(18) << "partition"
        << "action\n";
    for (const auto* c : db.cases()) {
        out << std::left << std::setw(6) << c->id << std::setw(13) << cbr::to_string(c->outcome) << std::setw(12)
            << util::format_number(c->confidence) << std::setw(12) << util::format_number(c->created_at)
            << std::setw(18) << c->context_signature << action_list(c->solution) << '\n';
    }
}

void cmd_db_show(const fs::path& db_path, std::uint64_t id, std::ostream& out)
{
    const auto db = load_db(db_path);
    const auto* c = db.find(id);
    if (!c) throw std::out_of_range("unknown case id " + std::to_string(id));
    out << cbr::to_json(*c).dump(2) << '\n';
}

void cmd_db_export(const fs::path& db_path, const fs::path& dest)
{
    cbr::save_database(load_db(db_path), dest);
}

namespace {

int cmd_serve(const fs::path& scenario, int port, const std::optional<fs::path>& db, int tick_ms, std::ostream& out)
{
    const auto file = load_scenario(scenario);
    service::ServiceOptions opts;
    opts.tick = std::chrono::milliseconds(tick_ms);

    // SIGINT/SIGTERM go to a waiter thread rather than an async handler.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    service::ServiceCore core(file.scenario, file.cbr, load_db_if_present(db), opts);
    service::HttpServer server(core);
    const int bound = server.bind("0.0.0.0", port);
    if (bound < 0) throw std::runtime_error("cannot bind port " + std::to_string(port));
    core.start();
    out << "listening on port " << bound << std::endl;

    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
    });
    server.listen_after_bind();
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    core.stop();
    if (db) {
        core.with_loop([&](ControlLoop& loop) { cbr::save_database(loop.engine().database(), *db); });
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"BAM reconfiguration with case-based reasoning"};
    app.require_subcommand(1);

    std::string scenario;
    std::string out_dir;
    std::string db_path;
    std::optional<std::uint64_t> seed;
    auto* run = app.add_subcommand("run", "Run the CBR control loop over a scenario");
    run->add_option("--scenario", scenario, "Scenario JSON file")->required();
    run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--db", db_path, "Case database to load (if present) and save");

    std::string models = "mam,rdm,atcs";
    auto* compare = app.add_subcommand("compare", "Compare fixed models and CBR control on one trace");
    compare->add_option("--scenario", scenario, "Scenario JSON file")->required();
    compare->add_option("--models", models, "Comma-separated models");

    auto* db = app.add_subcommand("db", "Inspect a case database file");
    db->add_option("--db", db_path, "Case database file")->required();
    db->require_subcommand(1);
    db->add_subcommand("ls", "List cases");
    std::uint64_t show_id = 0;
    auto* show = db->add_subcommand("show", "Print one case");
    show->add_option("id", show_id, "Case id")->required();
    std::string export_path;
    auto* exp = db->add_subcommand("export", "Write the database in the exchange format");
    exp->add_option("path", export_path, "Destination file")->required();

    int port = 8080;
    int tick_ms = 100;
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API over a running loop");
    serve->add_option("--port", port, "TCP port (0 picks one)");
    serve->add_option("--scenario", scenario, "Scenario JSON file")->required();
    serve->add_option("--db", db_path, "Case database to load (if present) and save on exit");
    serve->add_option("--tick-ms", tick_ms, "Wall-clock milliseconds per simulated window")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    const auto opt_db = db_path.empty() ? std::nullopt : std::optional<fs::path>(db_path);
    try {
        if (*run) {
            const auto r = cmd_run(scenario, seed, out_dir, opt_db);
            out << "scenario " << r.scenario_id << " seed " << r.seed << '\n'
                << "final model " << bamsim::to_string(r.final_model) << '\n'
                << "blocking " << util::format_number(r.total.blocking) << " utilization "
                << util::format_number(r.total.utilization) << '\n'
                << "decisions " << r.stats.decisions << " hits " << r.stats.hits << " fallbacks "
                << r.stats.fallbacks << " retained " << r.stats.retained << '\n'
                << "wrote " << r.metrics.string() << ", " << r.decisions.string() << ", " << r.trace.string() << ", "
                << r.cases.string() << '\n';
        } else if (*compare) {
            const auto list = parse_models(models);
            out << format_comparison(cmd_compare(scenario, list));
        } else if (*db) {
            if (db->got_subcommand("ls")) {
                cmd_db_ls(db_path, out);
            } else if (db->got_subcommand("show")) {
                cmd_db_show(db_path, show_id, out);
            } else {
                cmd_db_export(db_path, export_path);
            }
        } else if (*serve) {
            return cmd_serve(scenario, port, opt_db, tick_ms, out);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace bamcbr::cli
