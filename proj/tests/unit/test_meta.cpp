#include "doctest.h"

#include "antic/meta_controller.hpp"
#include "antic/parser.hpp"
#include "fixtures.hpp"

using namespace antic;

namespace {

const std::vector<std::string> kPhases{"Monitor", "Interpret", "Evaluate", "Intend", "Plan", "Control"};

std::vector<std::string> names(const CycleResult& r) {
    std::vector<std::string> out;
    for (const auto& p : r.phases) out.push_back(p.name);
    return out;
}

}  // namespace

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("first canonical cycle inserts the hook and is achieved") {
    const auto c = fixtures::canonical();
    MetaController mc(c.task);
    const auto r = mc.run_cycle(CognitiveTrace::from_task(c.task, c.plan));
    CHECK(names(r) == kPhases);
    CHECK(r.status == CycleStatus::achieved);
    REQUIRE(r.meta_plan.edits.size() == 2);
    CHECK(r.meta_plan.edits[0].action.name() == "(buy-hook agent)");
    CHECK(r.meta_plan.edits[1].action.name() == "(pack-hook agent)");
    REQUIRE(r.assessment.has_value());
    CHECK(r.assessment->value == doctest::Approx(5.0 / 6.0));
    REQUIRE(r.goal.has_value());
    CHECK(r.goal->status == MetaGoalStatus::achieved);
    CHECK(r.trace.plan.size() == 11);
    CHECK(r.phases[1].detail.find("risk HIGH") == 0);
    // Monitor passes the trace through unchanged
    CHECK(r.phases[0].inputs_digest == r.phases[0].outputs_digest);
    // Control consumes what Plan produced
    CHECK(r.phases[5].inputs_digest == r.phases[4].outputs_digest);
}

TEST_CASE("second cycle sees low risk and makes no edits") {
    const auto c = fixtures::canonical();
    MetaController mc(c.task);
    const auto rs = mc.run_cycles(CognitiveTrace::from_task(c.task, c.plan), 2);
    REQUIRE(rs.size() == 2);
    const auto& second = rs[1];
    CHECK(names(second) == kPhases);
    CHECK(second.status == CycleStatus::no_discrepancy);
    CHECK(second.meta_plan.edits.empty());
    CHECK(second.dropped_goals == 1);
    CHECK_FALSE(second.assessment.has_value());
    CHECK(second.phases[1].detail.find("risk LOW") == 0);
    CHECK(second.phases[0].inputs_digest == rs[0].phases[5].outputs_digest);
    CHECK(mc.goals().empty());
}

TEST_CASE("phase log replays byte-identically") {
    const auto c = fixtures::canonical();
    MetaController a(c.task), b(c.task);
    const auto ra = a.run_cycles(CognitiveTrace::from_task(c.task, c.plan), 2);
    const auto rb = b.run_cycles(CognitiveTrace::from_task(c.task, c.plan), 2);
    CHECK(write_phase_log(ra) == write_phase_log(rb));
    CHECK(write_phase_log(ra) == io::read_file(fixtures::data("nbeacons/golden/meta.json")));
    const auto single = write_phase_log(ra.front());
    CHECK(single.find("\"cycles\"") == std::string::npos);
    CHECK(single.find("\"at_assess\": 0.833333") != std::string::npos);
}

TEST_CASE("risk-free traces produce no meta-goal") {
    const auto f = fixtures::load("fixtures/corridor");
    MetaController mc(f.task);
    const auto r = mc.run_cycle(CognitiveTrace::from_task(f.task, f.plan));
    CHECK(names(r) == kPhases);
    CHECK(r.status == CycleStatus::no_discrepancy);
    CHECK_FALSE(r.goal.has_value());
    CHECK(r.trace.plan.steps == f.plan.steps);
    CHECK(write_phase_log(r).find("\"at_assess\": null") != std::string::npos);
}

TEST_CASE("partial mitigation fails verification") {
    const auto f = fixtures::load("fixtures/weather");
    MetaController mc(f.task);
    const auto rs = mc.run_cycles(CognitiveTrace::from_task(f.task, f.plan), 3);
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].status == CycleStatus::failed);
    CHECK(rs[0].diagnostic.find("HIGH") != std::string::npos);
    CHECK(rs[0].trace.plan.steps == f.plan.steps);
    REQUIRE(rs[0].goal.has_value());
    CHECK(rs[0].goal->status == MetaGoalStatus::committed);
}

TEST_CASE("a plan that misses its goal fails at Interpret") {
    const auto c = fixtures::canonical();
    auto trace = CognitiveTrace::from_task(c.task, c.plan);
    trace.plan.steps.pop_back();
    MetaController mc(c.task);
    const auto r = mc.run_cycle(trace);
    CHECK(r.status == CycleStatus::failed);
    CHECK(r.phases.size() == 2);
    CHECK(r.phases.back().name == "Interpret");
}

TEST_CASE("mitigation budget surfaces as budget-exhausted") {
    const auto c = fixtures::canonical();
    MetaConfig config;
    config.mitigation.budget = 1;
    MetaController mc(c.task, config);
    const auto rs = mc.run_cycles(CognitiveTrace::from_task(c.task, c.plan), 3);
    REQUIRE(rs.size() == 1);
    CHECK(rs[0].status == CycleStatus::budget_exhausted);
    CHECK(to_string(rs[0].status) == "budget-exhausted");
}

TEST_CASE("explain reports the trace's vulnerabilities") {
    const auto c = fixtures::canonical();
    const auto v = explain(CognitiveTrace::from_task(c.task, c.plan), c.task);
    CHECK(v.events.size() == 4);
    REQUIRE_FALSE(v.prestrength.empty());
    CHECK(v.prestrength.front().uses == 8);

    auto empty = CognitiveTrace::from_task(c.task, GroundPlan{});
    empty.goal = {Atom{"canMove", {"agent"}}};
    const auto e = explain(empty, c.task);
    CHECK(e.events.empty());
    CHECK(e.prestrength.empty());
}
