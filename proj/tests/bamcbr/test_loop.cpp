#include "doctest.h"

#include <sstream>

#include "bam_oracle.hpp"
#include "bamcbr/loop.hpp"
#include "bamcbr/report.hpp"
#include "generators.hpp"

using namespace bamcbr;
using bamsim::BamModel;

namespace {

// Light load on every class: utilization well under one half, no blocking.
bamsim::Scenario light(std::uint64_t seed = 11)
{
    bamsim::Scenario s;
    s.id = "light";
    s.seed = seed;
    s.duration = 2000;
    s.traffic.push_back({0, 0.2, 20, 1, 4, 0, std::nullopt});
    s.traffic.push_back({1, 0.15, 20, 1, 3, 0, std::nullopt});
    s.traffic.push_back({2, 0.1, 20, 1, 3, 0, std::nullopt});
    return s;
}

bool same_records(const std::vector<DecisionRecord>& a, const std::vector<DecisionRecord>& b)
{
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].time != b[i].time || a[i].action != b[i].action || a[i].before_score != b[i].before_score ||
            a[i].after_score != b[i].after_score || a[i].source_case != b[i].source_case) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("premise reproduction on a lightly loaded link")
{
    ControlLoop loop(light(), {});
    loop.run();
    REQUIRE_FALSE(loop.decisions().empty());
    const auto& first = loop.decisions().front();
    CHECK(first.time == 500);
    CHECK(first.trigger == Trigger::proactive);
    CHECK(first.origin == "retrieved");
    CHECK(first.similarity >= 0.96);
    CHECK(first.action == "SwitchBAM(ATCS)");
    CHECK(loop.model() == BamModel::atcs);
}

TEST_CASE("window bookkeeping")
{
    auto s = light();
    s.duration = 1010;
    ControlLoop loop(s, {});
    std::vector<std::size_t> closed;
    loop.set_observer([&](LoopEventType type, std::size_t i) {
        if (type == LoopEventType::window_closed) closed.push_back(i);
    });
    loop.run();
    CHECK(loop.finished());
    CHECK_FALSE(loop.step());
    REQUIRE(loop.windows().size() == 21);
    CHECK(closed.size() == 21);
    CHECK(loop.windows().back().m.end == 1010);
    for (std::size_t i = 0; i < loop.windows().size(); ++i) {
        const auto& w = loop.windows()[i];
        CHECK(w.m.start == 50.0 * static_cast<double>(i));
        CHECK(w.score >= 0.0);
        CHECK(w.score <= 1.0);
    }
    // The switch at 500 shows up from the next window on.
    CHECK(loop.windows()[9].model == BamModel::mam);
    CHECK(loop.windows()[10].model == BamModel::atcs);
}

TEST_CASE("no triggers inside a review; reactive only below the alarm")
{
    const auto s = gen::skewed_scenario(5);
    BamCbrConfig cfg;
    ControlLoop loop(s, cfg);
    loop.run();
    const double review = s.window;
    double busy_until = -1;
    int proactive = 0;
    for (const auto& d : loop.decisions()) {
        CHECK(d.time > busy_until);
        if (d.trigger == Trigger::reactive) {
            const auto& w = loop.windows()[static_cast<std::size_t>(d.time / s.window) - 1];
            CHECK(w.score < cfg.alarm_threshold);
            CHECK(d.before_score == w.score);
        } else {
            // Postponed past a review if one was running at the boundary.
            ++proactive;
            CHECK(d.time >= proactive * cfg.proactive_period);
        }
        if (d.kind == DecisionKind::action) busy_until = d.time + cfg.settle_time + review;
    }
    CHECK(loop.stats().decisions == loop.stats().hits + loop.stats().fallbacks);

    // The loop's own switches keep the trace consistent.
    const auto rep = oracle::replay(loop.simulator().trace(), s.link, s.initial_model);
    CHECK(rep.violations.empty());
}

TEST_CASE("the loop is deterministic for a seed")
{
    ControlLoop a(gen::skewed_scenario(8), {});
    ControlLoop b(gen::skewed_scenario(8), {});
    a.run();
    b.run();
    CHECK(same_records(a.decisions(), b.decisions()));
    CHECK(a.simulator().trace() == b.simulator().trace());
}

TEST_CASE("a second run over the learned database reuses cases")
{
    BamCbrConfig cfg;
    const auto s = gen::skewed_scenario(5);
    ControlLoop first(s, cfg);
    first.run();
    REQUIRE(first.stats().retained > 0);

    ControlLoop second(s, cfg, first.engine().database());
    second.run();
    CHECK(second.stats().hits > 0);
    CHECK(second.stats().hit_rate() > 0.0);
}

TEST_CASE("assisted mode")
{
    BamCbrConfig cfg;
    cfg.mode = cbr::ResolutionMode::assisted;

    SUBCASE("an empty retrieval pauses the loop until the operator decides")
    {
        cfg.seed_premises = false;
        ControlLoop loop(gen::skewed_scenario(5), cfg);
        std::vector<LoopEventType> events;
        loop.set_observer([&](LoopEventType t, std::size_t) { events.push_back(t); });
        loop.run();
        REQUIRE(loop.paused());
        CHECK_FALSE(loop.finished());
        CHECK_FALSE(loop.step());
        REQUIRE(loop.revisions().size() == 1);
        const auto& rev = loop.revisions()[0];
        CHECK(rev.id == 1);
        CHECK(rev.status == RevisionStatus::pending);
        CHECK_FALSE(rev.revised);
        CHECK(loop.decisions().back().action == "pending");
        CHECK(events.back() == LoopEventType::revision_queued);
        CHECK(loop.model() == BamModel::mam);

        CHECK_THROWS_AS(loop.submit_verdict(1, {VerdictKind::approve, {}, ""}), RevisionError);
        try {
            loop.submit_verdict(1, {VerdictKind::adjust, {switch_action(BamModel::mam)}, ""});
            FAIL("expected a RevisionError");
        } catch (const RevisionError& e) {
            CHECK(e.code() == RevisionError::Code::invalid);
        }
        try {
            loop.submit_verdict(7, {VerdictKind::reject, {}, ""});
            FAIL("expected a RevisionError");
        } catch (const RevisionError& e) {
            CHECK(e.code() == RevisionError::Code::not_found);
        }

        const auto& done = loop.submit_verdict(1, {VerdictKind::adjust, {switch_action(BamModel::atcs)}, "borrow"});
        CHECK(done.status == RevisionStatus::decided);
        REQUIRE(done.retain);
        CHECK(done.retain->status == cbr::RetainStatus::stored);
        const auto* stored = loop.engine().database().find(done.retain->id);
        REQUIRE(stored);
        CHECK(stored->outcome == cbr::Outcome::positive);
        CHECK(cbr::to_string(stored->solution.front()) == "SwitchBAM(ATCS)");
        CHECK(loop.model() == BamModel::atcs);
        CHECK(loop.decisions()[done.decision_index].outcome == "adjust");
        CHECK(loop.decisions()[done.decision_index].retained);

        try {
            loop.submit_verdict(1, {VerdictKind::reject, {}, ""});
            FAIL("expected a RevisionError");
        } catch (const RevisionError& e) {
            CHECK(e.code() == RevisionError::Code::conflict);
        }
        CHECK_FALSE(loop.paused());
        CHECK(loop.step());
    }
    SUBCASE("a trialled action waits for approval before it is retained")
    {
        ControlLoop loop(light(), cfg);
        loop.run();
        REQUIRE(loop.paused());
        const auto& rev = loop.revisions().back();
        REQUIRE(rev.revised);
        CHECK(rev.after);
        CHECK(rev.drift);
        CHECK(loop.model() == BamModel::atcs);
        const auto cases_before = loop.engine().database().size();

        const auto& done = loop.submit_verdict(rev.id, {VerdictKind::approve, {}, ""});
        REQUIRE(done.retain);
        if (done.retain->status == cbr::RetainStatus::stored) {
            const auto* c = loop.engine().database().find(done.retain->id);
            CHECK(c->outcome == cbr::Outcome::positive);
            CHECK(c->confidence == 1.0);
            CHECK(loop.engine().database().size() == cases_before + 1);
        }
    }
    SUBCASE("reject stores the lesson as negative")
    {
        ControlLoop loop(light(), cfg);
        loop.run();
        REQUIRE(loop.paused());
        const auto& done = loop.submit_verdict(loop.revisions().back().id, {VerdictKind::reject, {}, "no"});
        REQUIRE(done.retain);
        REQUIRE(done.retain->status == cbr::RetainStatus::stored);
        CHECK(loop.engine().database().find(done.retain->id)->outcome == cbr::Outcome::negative);
        CHECK(loop.decisions()[done.decision_index].outcome == "reject");
    }
}

TEST_CASE("compare_models")
{
    const std::vector<BamModel> models{BamModel::mam, BamModel::rdm, BamModel::atcs};
    SUBCASE("skewed load: sharing never blocks more")
    {
        const auto rows = compare_models(gen::skewed_scenario(3), {}, models);
        REQUIRE(rows.size() == 4);
        CHECK(rows[0].label == "MAM");
        CHECK(rows[3].label == "CBR");
        CHECK(rows[2].total.blocked <= rows[0].total.blocked);
        // The fixed-model rows match standalone runs.
        CHECK(rows[1].total == bamsim::run_scenario(gen::skewed_scenario(3), BamModel::rdm).total);
    }
    SUBCASE("idle link")
    {
        bamsim::Scenario idle;
        const auto rows = compare_models(idle, {}, models);
        REQUIRE(rows.size() == 4);
        for (const auto& r : rows) {
            CHECK(r.total.blocking == 0.0);
            CHECK(r.total.utilization == 0.0);
            CHECK(r.total.preemptions == 0);
            CHECK(r.total.devolutions == 0);
        }
        const auto text = format_comparison(rows);
        CHECK(text.find("model") != std::string::npos);
        CHECK(text.find("0.000000") != std::string::npos);
    }
}

TEST_CASE("CSV reports")
{
    ControlLoop loop(light(), {});
    loop.run();
    std::ostringstream metrics, decisions;
    write_metrics_csv(loop.windows(), metrics);
    write_decisions_csv(loop.decisions(), decisions);
    const auto m = metrics.str();
    const auto d = decisions.str();
    CHECK(m.rfind("window_start,window_end,model,utilization,throughput,blocking,requests,blocked,preemptions,"
                  "devolutions,score\n",
                  0) == 0);
    CHECK(std::count(m.begin(), m.end(), '\n') == static_cast<long>(loop.windows().size() + 1));
    CHECK(d.rfind("time,trigger,model,case_id,similarity,origin,action,before_score,after_score,outcome,retained,"
                  "stored_case\n",
                  0) == 0);
    CHECK(d.find("SwitchBAM(ATCS)") != std::string::npos);
}
