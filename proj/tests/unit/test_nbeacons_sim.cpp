#include "doctest.h"

#include <regex>
#include <set>

#include "antic/at_engine.hpp"
#include "antic/nbeacons.hpp"
#include "antic/parser.hpp"
#include "antic/simulator.hpp"
#include "fixtures.hpp"

using namespace antic;
using namespace antic::nbeacons;

namespace {

std::vector<std::pair<std::string, std::string>> downwind_facts(const std::string& problem) {
    std::vector<std::pair<std::string, std::string>> out;
    static const std::regex re(R"(\(downwind (\S+) (\S+)\))");
    for (auto it = std::sregex_iterator(problem.begin(), problem.end(), re); it != std::sregex_iterator(); ++it)
        out.emplace_back((*it)[1], (*it)[2]);
    return out;
}

// First pit within wind reach of each cell.
std::set<std::pair<std::string, std::string>> expected_downwind(const GridConfig& g) {
    std::set<Cell> pits(g.sandpits.begin(), g.sandpits.end());
    int dc = 0, dr = 0;
    switch (g.wind_direction) {
        case Direction::north: dr = 1; break;
        case Direction::south: dr = -1; break;
        case Direction::east: dc = 1; break;
        case Direction::west: dc = -1; break;
    }
    std::set<std::pair<std::string, std::string>> out;
    for (int c = 1; c <= g.width; ++c)
        for (int r = 1; r <= g.height; ++r) {
            for (int k = 1; k <= g.wind_speed; ++k) {
                const Cell next{c + dc * k, r + dr * k};
                if (next.column < 1 || next.column > g.width || next.row < 1 || next.row > g.height) break;
                if (pits.count(next)) {
                    out.insert({cell_name({c, r}), cell_name(next)});
                    break;
                }
            }
        }
    return out;
}

const GroundPlan& prime_plan() {
    static const GroundPlan plan = [] {
        const auto c = fixtures::canonical();
        return mitigate(c.plan, c.task, analyze(c.plan, c.task).events).plan;
    }();
    return plan;
}

sim::SimulationOptions aligned(const GroundPlan& reference, const GroundPlan& executed) {
    sim::SimulationOptions o;
    o.origin = embed(reference, executed);
    return o;
}

void check_conservation(const sim::ExecutionTrace& t) {
    double base = 0, rec = 0, rep = 0;
    for (const auto& s : t.executed) base += s.cost;
    for (const auto& s : t.recoveries) rec += s.cost;
    for (const auto& s : t.replans) rep += s.cost;
    CHECK(t.base_cost == doctest::Approx(base));
    CHECK(t.recovery_cost == doctest::Approx(rec));
    CHECK(t.replan_cost == doctest::Approx(rep));
    CHECK(t.total_cost() == doctest::Approx(base + rec + rep));
}

}  // namespace

// --- generator -----------------------------------------------------------------

TEST_CASE("two-cell grid without pits has no wind") {
    GridConfig g;
    g.width = 2;
    g.height = 1;
    g.agent_start = {1, 1};
    g.beacons = {{2, 1}};
    const auto files = generate(g);
    CHECK(downwind_facts(files.problem).empty());
    const auto task = fixtures::task_from(files);
    CHECK(task.event_actions().empty());
    const auto plan = find_plan(task);
    REQUIRE(plan.solved());
    CHECK(plan.cost == 2.0);
}

TEST_CASE("canonical layout puts four downwind facts on the path") {
    const auto s = canonical_scenario();
    const auto facts = downwind_facts(s.files.problem);
    CHECK(facts.size() == 20);
    std::size_t on_path = 0;
    for (const auto& [from, pit] : facts)
        if (from.rfind("c6-", 0) == 0) ++on_path;
    CHECK(on_path == 4);
    CHECK(s.plan ==
          "0: (move-north agent c6-1 c6-2)\n1: (move-north agent c6-2 c6-3)\n2: (move-north agent c6-3 c6-4)\n"
          "3: (move-north agent c6-4 c6-5)\n4: (move-north agent c6-5 c6-6)\n5: (move-north agent c6-6 c6-7)\n"
          "6: (move-north agent c6-7 c6-8)\n7: (move-north agent c6-8 c6-9)\n8: (activate agent c6-9 beacon)\n");
    CHECK(s.files.domain == io::read_file(fixtures::data("nbeacons/domain.pddl")));
    CHECK(s.files.problem == io::read_file(fixtures::data("nbeacons/problem.pddl")));
}

TEST_CASE("downwind facts agree with walking the wind on random grids") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        CAPTURE(seed);
        const auto g = random_config(2 + static_cast<int>(seed % 9), 2 + static_cast<int>(seed % 7), static_cast<int>(seed % 5), seed);
        const auto facts = downwind_facts(generate(g).problem);
        std::set<std::pair<std::string, std::string>> got(facts.begin(), facts.end());
        CHECK(got.size() == facts.size());
        CHECK(got == expected_downwind(g));
        for (const auto& [from, pit] : got) {
            (void)pit;
            bool found = false;
            for (int c = 1; c <= g.width && !found; ++c)
                for (int r = 1; r <= g.height && !found; ++r)
                    if (cell_name({c, r}) == from) found = downwind_sandpit(g, {c, r}).has_value();
            CHECK(found);
        }
    }
}

TEST_CASE("random generation is deterministic in the seed") {
    const auto a = generate(random_config(7, 6, 4, 42));
    const auto b = generate(random_config(7, 6, 4, 42));
    CHECK(a.problem == b.problem);
    CHECK(a.domain == b.domain);
    CHECK(a.problem != generate(random_config(7, 6, 4, 43)).problem);
    CHECK(a.domain == canonical_scenario().files.domain);
}

TEST_CASE("grid validation") {
    auto g = canonical_config();
    CHECK_NOTHROW(g.validate());
    g.sandpits.push_back({6, 1});
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("overlaps"), Error);
    g = canonical_config();
    g.beacons = {{11, 1}};
    CHECK_THROWS_WITH_AS(g.validate(), doctest::Contains("out of bounds"), Error);
    g = canonical_config();
    g.wind_probability = 1.5;
    CHECK_THROWS_AS(g.validate(), Error);
    g = canonical_config();
    g.width = 0;
    CHECK_THROWS_AS(g.validate(), Error);
    CHECK_THROWS_AS(random_config(2, 2, 3, 1), Error);
    CHECK(parse_direction("W") == Direction::west);
    CHECK_FALSE(parse_direction("up").has_value());
}

// --- simulator ---------------------------------------------------------------------

TEST_CASE("no wind means base cost only") {
    const auto c = fixtures::canonical();
    const auto t = sim::simulate(c.task, c.plan, sim::EventSchedule{});
    CHECK(t.status == sim::ExecutionTrace::Status::completed);
    CHECK(t.total_cost() == 9.0);
    CHECK(t.recovery_cost == 0.0);
    CHECK(t.events_fired() == 0);
    CHECK(entails(t.final_state, std::span<const Atom>(c.task.problem.goal)));
}

TEST_CASE("four scripted captures cost twelve to recover without the hook and four with it") {
    const auto c = fixtures::canonical();
    const auto schedule = sim::parse_schedule(io::read_file(fixtures::data("nbeacons/all4.json")));
    REQUIRE(schedule.entries.size() == 4);
    CHECK(*schedule.entries[0].impact == 3.0);

    const auto pi = sim::simulate(c.task, c.plan, schedule);
    CHECK(pi.events_fired() == 4);
    CHECK(pi.base_cost == 9.0);
    CHECK(pi.recovery_cost == 12.0);
    check_conservation(pi);

    const auto prime = sim::simulate(c.task, prime_plan(), schedule, aligned(c.plan, prime_plan()));
    CHECK(prime.events_fired() == 4);
    CHECK(prime.base_cost == 11.0);
    CHECK(prime.recovery_cost == 4.0);
    CHECK(prime.replan_cost == pi.replan_cost);
    check_conservation(prime);
    CHECK(pi.total_cost() - prime.total_cost() == doctest::Approx(6.0));

    CHECK(sim::to_csv(sim::scripted_rows(pi, &prime, 0)) == io::read_file(fixtures::data("nbeacons/golden/all4.csv")));
}

TEST_CASE("schedule round trip and validation") {
    const auto text = io::read_file(fixtures::data("nbeacons/all4.json"));
    const auto s = sim::parse_schedule(text);
    const auto again = sim::parse_schedule(sim::write_schedule(s));
    CHECK(sim::write_schedule(again) == sim::write_schedule(s));
    const auto st = sim::parse_schedule(R"({"stochastic":{"q":0.25,"seed":9,"window":3}})");
    CHECK(st.mode == sim::EventSchedule::Mode::stochastic);
    CHECK(st.probability == 0.25);
    CHECK(*st.window == 3);
    CHECK_THROWS_AS(sim::parse_schedule("{"), Error);
    CHECK_THROWS_AS(sim::parse_schedule(R"({"stochastic":{"q":2}})"), Error);
    CHECK_THROWS_AS(sim::parse_schedule(R"({"other":1})"), Error);

    const auto c = fixtures::canonical();
    const auto unknown = sim::parse_schedule(R"({"schedule":[{"after_step":1,"event":{"name":"tornado","args":[]}}]})");
    CHECK_THROWS_AS(sim::simulate(c.task, c.plan, unknown), Error);
}

TEST_CASE("inapplicable scripted events do not fire") {
    const auto c = fixtures::canonical();
    const auto s = sim::parse_schedule(
        R"({"schedule":[{"after_step":6,"event":{"name":"wind-capture","args":["agent","c6-2","c2-2"]}}]})");
    const auto t = sim::simulate(c.task, c.plan, s);
    REQUIRE(t.events.size() == 1);
    CHECK_FALSE(t.events[0].fired);
    CHECK(t.total_cost() == 9.0);
}

TEST_CASE("wind always blowing fires at exactly the four exposed cells") {
    const auto c = fixtures::canonical();
    const std::vector<double> zeros(c.plan.size(), 0.0);
    const auto t = sim::simulate_with_draws(c.task, c.plan, 1.0, zeros, std::nullopt);
    CHECK(t.events_fired() == 4);
    for (const auto& e : t.events) {
        CHECK(e.after_step >= 1);
        CHECK(e.after_step <= 4);
    }
    const auto none = sim::simulate_with_draws(c.task, c.plan, 0.0, zeros, std::nullopt);
    CHECK(none.events_fired() == 0);
}

TEST_CASE("fired wind is sound on random instances") {
    std::size_t checked = 0;
    for (std::uint64_t seed = 3000; checked < 40 && seed < 3400; ++seed) {
        auto inst = fixtures::random_instance(seed);
        if (!inst) continue;
        CAPTURE(seed);
        const auto& task = inst->task;
        const auto events = task.event_actions();
        std::set<std::string> names;
        for (const auto& e : events) names.insert(e.name());
        const auto states = project(inst->plan, task.problem.init);
        const std::vector<double> draws(inst->plan.size(), 0.0);
        const auto t = sim::simulate_with_draws(task, inst->plan, 1.0, draws, std::nullopt);
        check_conservation(t);
        bool replanned_to_goal = false;
        for (const auto& r : t.replans) replanned_to_goal |= r.trigger == "replan to goal";
        for (const auto& e : t.events) {
            if (!e.fired) continue;
            CHECK(names.count(e.event) == 1);
            if (replanned_to_goal) continue;
            // the agent stands where the reference plan put it
            const auto ground = std::find_if(events.begin(), events.end(),
                                             [&](const GroundAction& a) { return a.name() == e.event; });
            CHECK(applicable(states.at(e.after_step), *ground));
        }
        if (t.status == sim::ExecutionTrace::Status::completed)
            CHECK(entails(t.final_state, std::span<const Atom>(task.problem.goal)));
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("monte carlo with certain wind and no wind") {
    const auto c = fixtures::canonical();
    const auto always = sim::monte_carlo(c.task, c.plan, prime_plan(), 1.0, 20, 5, 4);
    CHECK(always.trials == 20);
    CHECK(always.mean_net_saving == doctest::Approx(6.0));
    CHECK(always.var_net_saving == doctest::Approx(0.0));
    CHECK(always.mean_recovery_saving == doctest::Approx(8.0));
    CHECK(always.failures == 0);
    CHECK(always.rows.size() == 40);

    const auto calm = sim::monte_carlo(c.task, c.plan, prime_plan(), 0.0, 20, 5);
    CHECK(calm.mean_total_pi == 9.0);
    CHECK(calm.mean_total_prime == 11.0);
    CHECK(calm.mean_net_saving == doctest::Approx(-2.0));
}

TEST_CASE("monte carlo is reproducible and thread-independent") {
    const auto c = fixtures::canonical();
    const auto a = sim::monte_carlo(c.task, c.plan, prime_plan(), 0.3, 50, 11, 4, 1);
    const auto b = sim::monte_carlo(c.task, c.plan, prime_plan(), 0.3, 50, 11, 4, 4);
    CHECK(sim::to_csv(a.rows) == sim::to_csv(b.rows));
    CHECK(sim::write_summary(a) == sim::write_summary(b));
    const auto other = sim::monte_carlo(c.task, c.plan, prime_plan(), 0.3, 50, 12, 4, 1);
    CHECK(sim::to_csv(a.rows) != sim::to_csv(other.rows));
    // paired rows share the trial seed and the wind draws
    for (std::size_t i = 0; i < a.rows.size(); i += 2) {
        CHECK(a.rows[i].seed == a.rows[i + 1].seed);
        CHECK(a.rows[i].seed == sim::trial_seed(11, a.rows[i].trial));
        CHECK(a.rows[i].events_fired == a.rows[i + 1].events_fired);
    }
}

TEST_CASE("sample variance of the paired savings") {
    const auto c = fixtures::canonical();
    const auto s = sim::monte_carlo(c.task, c.plan, prime_plan(), 0.5, 200, 3, 4);
    double mean = 0;
    std::vector<double> d;
    for (std::size_t i = 0; i < s.rows.size(); i += 2) d.push_back(s.rows[i].total_cost - s.rows[i + 1].total_cost);
    for (double x : d) mean += x;
    mean /= static_cast<double>(d.size());
    double var = 0;
    for (double x : d) var += (x - mean) * (x - mean);
    var /= static_cast<double>(d.size() - 1);
    CHECK(s.mean_net_saving == doctest::Approx(mean));
    CHECK(s.var_net_saving == doctest::Approx(var));
    // each capture the hook absorbs saves two
    for (std::size_t i = 0; i < s.rows.size(); i += 2)
        CHECK(d[i / 2] == doctest::Approx(2.0 * static_cast<double>(s.rows[i].events_fired) - 2.0));
}

TEST_CASE("trial seeds differ per trial") {
    std::set<std::uint64_t> seeds;
    for (std::size_t t = 0; t < 1000; ++t) seeds.insert(sim::trial_seed(1, t));
    CHECK(seeds.size() == 1000);
}
