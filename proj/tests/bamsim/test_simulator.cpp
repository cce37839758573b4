#include "doctest.h"

#include <sstream>

#include "bam_oracle.hpp"
#include "bamsim/simulator.hpp"
#include "generators.hpp"

using namespace bamsim;

namespace {

TraceEvent arrival(SimTime t, LspId id, double demand, const char* outcome, double after)
{
    return {t, EventKind::arrival, id, 0, demand, outcome, {}, {}, after};
}

}  // namespace

TEST_CASE("measure")
{
    SUBCASE("idle window")
    {
        const auto m = measure({}, 0, 50, 100);
        CHECK(m.utilization == 0.0);
        CHECK(m.blocking == 0.0);
        CHECK(m.throughput == 1.0);
        CHECK(m.requests == 0);
    }
    SUBCASE("one LSP at full capacity over the whole window")
    {
        const std::vector<TraceEvent> t{arrival(5, 1, 100, "admitted", 100)};
        const auto m = measure(t, 10, 60, 100);
        CHECK(m.utilization == 1.0);
        CHECK(m.requests == 0);  // arrived before the window
    }
    SUBCASE("10 requests, 2 blocked")
    {
        std::vector<TraceEvent> t;
        for (int i = 0; i < 10; ++i) {
            t.push_back(arrival(i, static_cast<LspId>(i + 1), 1.0, i < 2 ? "blocked" : "admitted", 0));
        }
        const auto m = measure(t, 0, 10, 100);
        CHECK(m.requests == 10);
        CHECK(m.blocked == 2);
        CHECK(m.blocking == doctest::Approx(0.2));
        CHECK(m.throughput == doctest::Approx(0.8));
    }
    SUBCASE("time weighting and the half-open window")
    {
        const std::vector<TraceEvent> t{arrival(0, 1, 50, "admitted", 50),
                                        {5, EventKind::departure, 1, 0, 50, "released", {}, {}, 0},
                                        arrival(10, 2, 20, "admitted", 20)};
        const auto m = measure(t, 0, 10, 100);
        CHECK(m.utilization == doctest::Approx(0.25));
        CHECK(m.requests == 1);
        const auto next = measure(t, 10, 20, 100);
        CHECK(next.requests == 1);
        CHECK(next.utilization == doctest::Approx(0.2));
    }
    SUBCASE("counts come from the reported ids")
    {
        const std::vector<TraceEvent> t{{1, EventKind::arrival, 3, 2, 5, "preemption", {1, 2}, {}, 5},
                                        {2, EventKind::model_switch, 0, -1, 0, "ATCS->MAM", {}, {7}, 5}};
        const auto m = measure(t, 0, 10, 100);
        CHECK(m.preemptions == 2);
        CHECK(m.devolutions == 1);
        CHECK(m.requests == 1);
    }
}

TEST_CASE("scenario validation")
{
    Scenario s;
    s.traffic.push_back({0, 1.0, 10, 1, 2, 0, std::nullopt});
    CHECK_NOTHROW(validate_scenario(s));
    SUBCASE("non-positive rate")
    {
        s.traffic[0].arrival_rate = 0;
        CHECK_THROWS_WITH_AS(validate_scenario(s), doctest::Contains("traffic[0].arrival_rate"), ConfigError);
    }
    SUBCASE("class out of range")
    {
        s.traffic[0].cls = 3;
        CHECK_THROWS_AS(validate_scenario(s), ConfigError);
    }
    SUBCASE("demand range")
    {
        s.traffic[0].demand_max = 0.5;
        CHECK_THROWS_AS(validate_scenario(s), ConfigError);
    }
    SUBCASE("window")
    {
        s.window = 0;
        CHECK_THROWS_AS(validate_scenario(s), ConfigError);
    }
    SUBCASE("link")
    {
        s.link.bc_rdm = {90, 60, 30};
        CHECK_THROWS_WITH_AS(validate_scenario(s), doctest::Contains("bc_rdm[0] must equal capacity"), ConfigError);
    }
}

TEST_CASE("no traffic gives an empty trace")
{
    Scenario s;
    s.duration = 200;
    const auto r = run_scenario(s, BamModel::mam);
    CHECK(r.trace.empty());
    CHECK(r.windows.size() == 4);
    CHECK(r.total.utilization == 0.0);
    CHECK(r.total.blocking == 0.0);
}

TEST_CASE("windows tile the run; the last one may be short")
{
    Scenario s;
    s.duration = 120;
    s.traffic.push_back({1, 0.5, 10, 1, 2, 0, std::nullopt});
    const auto r = run_scenario(s, BamModel::rdm);
    REQUIRE(r.windows.size() == 3);
    CHECK(r.windows[2].start == 100);
    CHECK(r.windows[2].end == 120);
    std::uint64_t requests = 0;
    for (const auto& w : r.windows) requests += w.requests;
    CHECK(requests == r.total.requests);
}

TEST_CASE("same seed, same trace; the seed matters")
{
    auto s = gen::skewed_scenario(9);
    for (auto model : kAllModels) {
        const auto a = run_scenario(s, model);
        const auto b = run_scenario(s, model);
        CHECK(a.trace == b.trace);
        CHECK(a.windows == b.windows);
        std::ostringstream ca, cb;
        write_trace_csv(a.trace, ca);
        write_trace_csv(b.trace, cb);
        CHECK(ca.str() == cb.str());
    }
    auto other = s;
    other.seed = 10;
    CHECK(run_scenario(s, BamModel::mam).trace != run_scenario(other, BamModel::mam).trace);
}

TEST_CASE("adding a source does not disturb the others' draws")
{
    Scenario s;
    s.duration = 300;
    s.traffic.push_back({0, 0.2, 5, 1, 1, 0, std::nullopt});
    auto wider = s;
    wider.traffic.push_back({2, 0.2, 5, 1, 1, 0, std::nullopt});
    std::vector<double> a, b;
    for (const auto& e : run_scenario(s, BamModel::mam).trace) {
        if (e.kind == EventKind::arrival) a.push_back(e.time);
    }
    for (const auto& e : run_scenario(wider, BamModel::mam).trace) {
        if (e.kind == EventKind::arrival && e.cls == 0) b.push_back(e.time);
    }
    CHECK(a == b);
}

TEST_CASE("light load is never blocked")
{
    Scenario s;
    s.duration = 2000;
    s.traffic.push_back({1, 0.1, 10, 1, 2, 0, std::nullopt});  // about 1.5 offered against 30
    for (auto model : kAllModels) {
        const auto r = run_scenario(s, model);
        CHECK(r.total.requests > 100);
        CHECK(r.total.blocking == 0.0);
        CHECK(r.total.throughput == 1.0);
    }
}

TEST_CASE("trace ordering")
{
    const auto r = run_scenario(gen::skewed_scenario(3), BamModel::atcs);
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        const auto& a = r.trace[i - 1];
        const auto& b = r.trace[i];
        REQUIRE(a.time <= b.time);
        if (a.time == b.time && a.kind == EventKind::departure) REQUIRE(b.kind != EventKind::arrival);
    }
}

TEST_CASE("switching mid-run is recorded in the trace")
{
    auto s = gen::skewed_scenario(4);
    s.initial_model = BamModel::atcs;
    Simulator sim(s);
    sim.run_until(300);
    const auto borrowed = std::count_if(sim.link().active().begin(), sim.link().active().end(),
                                        [](const ActiveLsp& l) { return l.borrowed; });
    REQUIRE(borrowed > 0);
    const auto report = sim.switch_model(BamModel::mam);
    CHECK(report.devolved.size() == static_cast<std::size_t>(borrowed));
    REQUIRE_FALSE(sim.trace().empty());
    CHECK(sim.trace().back().kind == EventKind::model_switch);
    CHECK(sim.trace().back().outcome == "ATCS->MAM");
    CHECK(sim.switch_model(BamModel::mam).devolved.empty());
    CHECK(sim.trace().back().outcome == "ATCS->MAM");

    sim.run_until(600);
    const auto rep = oracle::replay(sim.trace(), s.link, BamModel::atcs);
    CHECK(rep.violations.empty());
    CHECK(rep.devolutions == sim.link().devolutions());
    CHECK(sim.measure(250, 350).devolutions >= report.devolved.size());
}

TEST_CASE("random scenarios replay cleanly under every model")
{
    gen::Rng rng(8080);
    for (int i = 0; i < 15; ++i) {
        for (auto model : kAllModels) {
            const auto s = gen::random_scenario(rng, model);
            const auto r = run_scenario(s, model);
            const auto rep = oracle::replay(r.trace, s.link, model);
            INFO(to_string(model) << " #" << i << ": " << (rep.violations.empty() ? "" : rep.violations.front()));
            CHECK(rep.violations.empty());
            CHECK(rep.preemptions == r.preemptions);
            CHECK(rep.devolutions == r.devolutions);
            CHECK(rep.blocked == r.total.blocked);
            if (model != BamModel::atcs) CHECK(rep.borrowed == 0);
            for (const auto& w : r.windows) {
                CHECK(w.utilization >= 0.0);
                CHECK(w.utilization <= 1.0);
                CHECK(w.blocking <= 1.0);
                CHECK(w.throughput <= 1.0);
            }
        }
    }
}

TEST_CASE("trace CSV columns")
{
    const std::vector<TraceEvent> t{{1.5, EventKind::arrival, 3, 2, 5, "preemption", {1, 2}, {}, 5}};
    std::ostringstream out;
    write_trace_csv(t, out);
    CHECK(out.str() == "time,kind,lsp,class,demand,outcome,victims,devolved,allocated\n"
                       "1.5,arrival,3,2,5,preemption,1;2,,5\n");
}
